#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "tsks/calibration.hpp"
#include "tsks/detector.hpp"
#include "tsks/math.hpp"

// The policy layer: classical Thompson sampling plus the discounted and
// change-detecting variants, sharing one reward-mapping and Beta-posterior
// core.

namespace tsks {

struct BetaPosterior {
    double alpha = 1.0;
    double beta = 1.0;

    double mean() const { return alpha / (alpha + beta); }

    template <typename Rng>
    double sample(Rng& rng) const {
        std::gamma_distribution<double> ga(alpha, 1.0), gb(beta, 1.0);
        const double a = ga(rng);
        const double b = gb(rng);
        return a / (a + b);
    }
};

/// Affine map of raw rewards onto [0, 1], clamped; the support is padded by
/// sigma * Q^-1(epsilon_b) on each side so at most 2*epsilon_b of the reward
/// mass falls outside.
struct RewardMapper {
    double mu_min = 0.0;
    double mu_max = 1.0;
    double sigma = 1.0;
    double epsilon_b = 0.01;
    double lower = 0.0;
    double upper = 1.0;

    RewardMapper() { recompute(); }
    RewardMapper(double mu_min_, double mu_max_, double sigma_, double epsilon_b_ = 0.01)
        : mu_min(mu_min_), mu_max(mu_max_), sigma(sigma_), epsilon_b(epsilon_b_) {
        recompute();
    }

    void recompute() {
        if (!(sigma > 0.0)) throw std::invalid_argument("RewardMapper: sigma must be positive");
        if (!(epsilon_b > 0.0 && epsilon_b < 0.5))
            throw std::invalid_argument("RewardMapper: epsilon_b must lie in (0, 0.5)");
        const double pad = sigma * q_inverse(epsilon_b);
        lower = mu_min - pad;
        upper = mu_max + pad;
        if (!(lower < upper)) throw std::invalid_argument("RewardMapper: degenerate support");
    }

    double map(double raw) const {
        return std::clamp((raw - lower) / (upper - lower), 0.0, 1.0);
    }
};

enum class PolicyKind { ts, dts, ts_cd, ts_ks };

inline const char* policy_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::ts: return "TS";
        case PolicyKind::dts: return "dTS";
        case PolicyKind::ts_cd: return "TS-CD";
        case PolicyKind::ts_ks: return "TS-KS";
    }
    return "?";
}

inline PolicyKind policy_from_name(const std::string& s) {
    if (s == "TS" || s == "ts") return PolicyKind::ts;
    if (s == "dTS" || s == "dts") return PolicyKind::dts;
    if (s == "TS-CD" || s == "ts-cd" || s == "ts_cd") return PolicyKind::ts_cd;
    if (s == "TS-KS" || s == "ts-ks" || s == "ts_ks") return PolicyKind::ts_ks;
    throw std::invalid_argument("unknown policy: " + s);
}

struct UpdateResult {
    bool bernoulli_outcome = false;
    std::optional<DetectionOutcome> detection;
};

/// Single-owner mutable policy state; one seeded generator per instance.
class PolicyState {
public:
    PolicyState(PolicyKind kind, std::size_t arms, std::uint64_t seed,
                std::optional<DetectorCalibration> calibration = std::nullopt,
                double discount = 0.95)
        : kind_(kind), posteriors_(arms), cache_(arms), rng_(seed),
          calibration_(std::move(calibration)), discount_(discount) {
        if (arms == 0) throw std::invalid_argument("PolicyState: need at least one arm");
        if ((kind == PolicyKind::ts_cd || kind == PolicyKind::ts_ks) && !calibration_)
            throw std::invalid_argument("PolicyState: detector policy needs a calibration");
    }

    /// One Beta draw per arm, argmax; ties to the lowest index.
    std::size_t select_arm() {
        std::size_t best = 0;
        double best_theta = -1.0;
        for (std::size_t j = 0; j < posteriors_.size(); ++j) {
            const double theta = posteriors_[j].sample(rng_);
            if (theta > best_theta) {
                best_theta = theta;
                best = j;
            }
        }
        return best;
    }

    /// Argmax of the posterior means; ties to the lowest index.
    std::size_t posterior_mean_best() const {
        std::size_t best = 0;
        for (std::size_t j = 1; j < posteriors_.size(); ++j)
            if (posteriors_[j].mean() > posteriors_[best].mean()) best = j;
        return best;
    }

    /// Applies one observed play: caches the raw reward, runs the Bernoulli
    /// trial with the given success probability, updates the arm's
    /// posterior, and (for the detecting variants, once past warmup) checks
    /// the believed-optimal arm for a change. On detection all posteriors,
    /// the play counter and the caches reset.
    UpdateResult update(std::size_t arm, double raw_reward, double success_probability) {
        if (arm >= posteriors_.size()) throw std::out_of_range("PolicyState: bad arm index");
        cache_.append(arm, raw_reward);

        bool x;
        if (success_probability <= 0.0) x = false;
        else if (success_probability >= 1.0) x = true;
        else x = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < success_probability;

        if (kind_ == PolicyKind::dts) {
            for (auto& p : posteriors_) {
                p.alpha = std::max(1.0, discount_ * p.alpha);
                p.beta = std::max(1.0, discount_ * p.beta);
            }
        }
        posteriors_[arm].alpha += x ? 1.0 : 0.0;
        posteriors_[arm].beta += x ? 0.0 : 1.0;
        ++count_;

        UpdateResult r;
        r.bernoulli_outcome = x;
        if ((kind_ == PolicyKind::ts_cd || kind_ == PolicyKind::ts_ks) &&
            count_ > calibration_->warmup_plays + calibration_->test_window) {
            const std::size_t kb = posterior_mean_best();
            const std::size_t need = static_cast<std::size_t>(calibration_->test_window +
                                                              calibration_->estimate_window);
            if (cache_.length(kb) >= need) {
                const auto outcome = kind_ == PolicyKind::ts_ks
                                         ? check_change(cache_, kb, *calibration_)
                                         : mean_shift_check(cache_, kb, *calibration_);
                r.detection = outcome;
                if (outcome.changed) reset();
            }
        }
        return r;
    }

    void reset() {
        for (auto& p : posteriors_) p = BetaPosterior{};
        cache_.reset();
        count_ = 1;
    }

    PolicyKind kind() const { return kind_; }
    long long count() const { return count_; }
    const std::vector<BetaPosterior>& posteriors() const { return posteriors_; }
    const RewardCache& cache() const { return cache_; }

private:
    PolicyKind kind_;
    std::vector<BetaPosterior> posteriors_;
    RewardCache cache_;
    long long count_ = 1;
    std::mt19937_64 rng_;
    std::optional<DetectorCalibration> calibration_;
    double discount_;
};

} // namespace tsks
