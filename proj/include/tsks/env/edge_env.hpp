#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "tsks/env/common.hpp"

// Edge-computing task-offloading environment: epoch-wise primary-user/server
// associations drive per-server workload buffers; the secondary user's
// reward is the latency margin against its deadline.

namespace tsks {

struct EdgeEnvParams {
    std::size_t servers = 3;        // |S|
    std::size_t users = 1000;       // |V|
    double offload_rate = 0.008;    // eta, Giga-cycles per second per user
    double task_size = 0.02;        // delta, Giga-cycles
    double deadline = 0.05;         // T_max, seconds
    double mean_epoch = 300.0;      // 1/lambda_C, steps
    double buffer_cap_lo = 0.5;     // B_max ~ U(lo, hi), Giga-cycles
    double buffer_cap_hi = 1.0;
    double capacity_lo = 2.0;       // C_k ~ U(lo, hi), Giga-cycles per second
    double capacity_hi = 4.0;

    void validate() const {
        if (servers < 1) throw std::invalid_argument("EdgeEnvParams: need at least one server");
        if (!(mean_epoch > 0.0)) throw std::invalid_argument("EdgeEnvParams: mean_epoch must be positive");
        if (!(capacity_lo > 0.0) || capacity_hi < capacity_lo)
            throw std::invalid_argument("EdgeEnvParams: bad capacity range");
        if (!(buffer_cap_lo >= 0.0) || buffer_cap_hi < buffer_cap_lo)
            throw std::invalid_argument("EdgeEnvParams: bad buffer cap range");
    }
};

/// Multinomial split of `user_count` users over `server_count` servers with
/// equal association probability.
template <typename Rng>
std::vector<std::size_t> partition_users(std::size_t user_count, std::size_t server_count,
                                         Rng& rng) {
    if (server_count == 0) throw std::invalid_argument("partition_users: need at least one server");
    std::vector<std::size_t> counts(server_count, 0);
    // Chain of binomials: exact multinomial sample.
    std::size_t remaining = user_count;
    for (std::size_t k = 0; k + 1 < server_count && remaining > 0; ++k) {
        const double p = 1.0 / static_cast<double>(server_count - k);
        std::binomial_distribution<std::size_t> bin(remaining, p);
        counts[k] = bin(rng);
        remaining -= counts[k];
    }
    counts[server_count - 1] += remaining;
    return counts;
}

/// One draw of the epoch's buffer law: uniform between the epoch-start
/// buffer and its linear drift endpoint, clamped to [0, cap].
template <typename Rng>
double buffer_sample(double start, double drift_per_step, double epoch_length, double cap,
                     Rng& rng) {
    const double end = start + drift_per_step * epoch_length;
    const double lo = std::min(start, end);
    const double hi = std::max(start, end);
    const double v = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
    return std::clamp(v, 0.0, cap);
}

class EdgeComputeEnv {
public:
    EdgeComputeEnv(EdgeEnvParams params, std::uint64_t seed) : params_(params), rng_(seed) {
        params_.validate();
        buffer_cap_.resize(params_.servers);
        capacity_.resize(params_.servers);
        for (std::size_t k = 0; k < params_.servers; ++k) {
            buffer_cap_[k] = std::uniform_real_distribution<double>(params_.buffer_cap_lo,
                                                                    params_.buffer_cap_hi)(rng_);
            capacity_[k] = std::uniform_real_distribution<double>(params_.capacity_lo,
                                                                  params_.capacity_hi)(rng_);
        }
        begin_epoch();
    }

    StepOutcome step(std::size_t server) {
        if (server >= params_.servers) throw std::out_of_range("EdgeComputeEnv: bad server");
        ++now_;
        StepOutcome out;
        if (now_ > epoch_end_) {
            begin_epoch();
            out.change_occurred = true;
        }
        const double buffer = buffer_sample(buffer_start_[server], drift_[server],
                                            static_cast<double>(epoch_length_),
                                            buffer_cap_[server], rng_);
        const double latency = (buffer + params_.task_size) / capacity_[server];
        out.raw_reward = params_.deadline - latency;
        out.binary_reward = latency <= params_.deadline ? 1.0 : 0.0;
        const auto best = std::max_element(expected_reward_.begin(), expected_reward_.end());
        out.oracle_arm = static_cast<std::size_t>(best - expected_reward_.begin());
        out.oracle_mean = *best;
        out.chosen_mean = expected_reward_[server];
        return out;
    }

    const std::vector<std::size_t>& user_counts() const { return user_counts_; }
    const std::vector<double>& expected_rewards() const { return expected_reward_; }
    const std::vector<double>& buffer_caps() const { return buffer_cap_; }
    long long epoch_length() const { return epoch_length_; }

private:
    void begin_epoch() {
        user_counts_ = partition_users(params_.users, params_.servers, rng_);
        const double gap = std::exponential_distribution<double>(1.0 / params_.mean_epoch)(rng_);
        epoch_length_ = std::max<long long>(1, static_cast<long long>(std::ceil(gap)));
        epoch_end_ = now_ + epoch_length_ - 1;
        buffer_start_.resize(params_.servers);
        drift_.resize(params_.servers);
        expected_reward_.resize(params_.servers);
        for (std::size_t k = 0; k < params_.servers; ++k) {
            buffer_start_[k] =
                std::uniform_real_distribution<double>(0.0, buffer_cap_[k])(rng_);
            drift_[k] = static_cast<double>(user_counts_[k]) * params_.offload_rate - capacity_[k];
            const double expected_buffer =
                expected_clamped_uniform(buffer_start_[k],
                                         buffer_start_[k] + drift_[k] * static_cast<double>(epoch_length_),
                                         buffer_cap_[k]);
            expected_reward_[k] =
                params_.deadline - (expected_buffer + params_.task_size) / capacity_[k];
        }
    }

    // E[clamp(U(a, b), 0, cap)], exact.
    static double expected_clamped_uniform(double a, double b, double cap) {
        const double lo = std::min(a, b), hi = std::max(a, b);
        if (hi == lo) return std::clamp(lo, 0.0, cap);
        double acc = 0.0;
        const double l1 = std::max(lo, 0.0), h1 = std::min(hi, cap);
        if (h1 > l1) acc += 0.5 * (l1 + h1) * (h1 - l1);  // interior, identity part
        if (hi > cap) acc += cap * (hi - std::max(lo, cap));  // clamped-above mass
        return acc / (hi - lo);
    }

    EdgeEnvParams params_;
    std::mt19937_64 rng_;
    std::vector<double> buffer_cap_;
    std::vector<double> capacity_;
    std::vector<std::size_t> user_counts_;
    std::vector<double> buffer_start_;
    std::vector<double> drift_;
    std::vector<double> expected_reward_;
    long long now_ = 0;
    long long epoch_end_ = -1;
    long long epoch_length_ = 0;
};

} // namespace tsks
