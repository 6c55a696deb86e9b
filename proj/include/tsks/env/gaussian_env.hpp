#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "tsks/env/common.hpp"

// Piecewise-stationary Gaussian bandit environment: all arms' means jump
// simultaneously at Poisson change points.

namespace tsks {

struct GaussianEnvParams {
    std::size_t arms = 2;
    double sigma = 0.5;
    double change_rate = 1.0 / 300.0;  // lambda_C, events per step
    double delta_min = 0.5;
    double delta_max = 1.5;
    double delta_mu = 0.5;
    double mu_min = 0.0;
    double mu_max = 4.0;

    void validate() const {
        if (arms < 1) throw std::invalid_argument("GaussianEnvParams: need at least one arm");
        if (!(sigma >= 0.0)) throw std::invalid_argument("GaussianEnvParams: sigma must be >= 0");
        if (change_rate < 0.0) throw std::invalid_argument("GaussianEnvParams: change_rate must be >= 0");
        if (delta_min < 0.0 || delta_max < delta_min)
            throw std::invalid_argument("GaussianEnvParams: require 0 <= delta_min <= delta_max");
        if (!(mu_min < mu_max)) throw std::invalid_argument("GaussianEnvParams: mu_min < mu_max required");
        if (mu_max - mu_min < delta_mu * static_cast<double>(arms))
            throw std::invalid_argument("GaussianEnvParams: support too narrow for delta_mu gaps");
    }
};

class PiecewiseGaussianEnv {
public:
    PiecewiseGaussianEnv(GaussianEnvParams params, std::uint64_t seed)
        : params_(params), rng_(seed) {
        params_.validate();
        means_ = draw_initial_means();
        schedule_next_change();
    }

    /// Draws a reward for the chosen arm; any due change is applied first.
    StepOutcome step(std::size_t arm) {
        if (arm >= params_.arms) throw std::out_of_range("PiecewiseGaussianEnv: bad arm");
        ++now_;
        StepOutcome out;
        if (params_.change_rate > 0.0 && now_ >= next_change_) {
            apply_change();
            schedule_next_change();
            out.change_occurred = true;
        }
        out.raw_reward = means_[arm] + params_.sigma * normal_(rng_);
        const auto best = std::max_element(means_.begin(), means_.end());
        out.oracle_arm = static_cast<std::size_t>(best - means_.begin());
        out.oracle_mean = *best;
        out.chosen_mean = means_[arm];
        return out;
    }

    /// Shifts every arm's mean by an independent magnitude in
    /// [delta_min, delta_max] with a uniform sign, resampling until the
    /// support bounds and pairwise gaps hold.
    void apply_change() {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            std::vector<double> next(params_.arms);
            for (std::size_t i = 0; i < params_.arms; ++i) {
                const double mag = std::uniform_real_distribution<double>(
                    params_.delta_min, params_.delta_max)(rng_);
                const double sign = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < 0.5
                                        ? -1.0 : 1.0;
                next[i] = means_[i] + sign * mag;
            }
            if (feasible(next)) {
                means_ = std::move(next);
                return;
            }
        }
        throw std::runtime_error("PiecewiseGaussianEnv: infeasible change configuration");
    }

    const std::vector<double>& means() const { return means_; }
    long long now() const { return now_; }
    long long next_change_step() const { return next_change_; }
    const GaussianEnvParams& params() const { return params_; }

private:
    bool feasible(const std::vector<double>& m) const {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] < params_.mu_min || m[i] > params_.mu_max) return false;
            for (std::size_t j = i + 1; j < m.size(); ++j)
                if (std::abs(m[i] - m[j]) < params_.delta_mu) return false;
        }
        return true;
    }

    std::vector<double> draw_initial_means() {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            std::vector<double> m(params_.arms);
            for (auto& v : m)
                v = std::uniform_real_distribution<double>(params_.mu_min, params_.mu_max)(rng_);
            if (feasible(m)) return m;
        }
        throw std::runtime_error("PiecewiseGaussianEnv: could not draw feasible initial means");
    }

    void schedule_next_change() {
        if (params_.change_rate <= 0.0) {
            next_change_ = std::numeric_limits<long long>::max();
            return;
        }
        const double gap = std::exponential_distribution<double>(params_.change_rate)(rng_);
        next_change_ = now_ + std::max<long long>(1, static_cast<long long>(std::ceil(gap)));
    }

    GaussianEnvParams params_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<double> means_;
    long long now_ = 0;
    long long next_change_ = 0;
};

} // namespace tsks
