#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "tsks/calibration.hpp"
#include "tsks/detector.hpp"

// Detection-delay measurement on a single injected change: pre-change
// samples N(0, sigma), post-change samples N(shift, sigma * sigma_ratio).

namespace tsks {

struct DelayResult {
    long long censor_limit = 0;     // 10 * n_T post-change samples
    double ks_mean_delay = 0.0;     // censored runs count at the limit
    double mean_shift_mean_delay = 0.0;
    double delay_difference = 0.0;  // KS - mean
    double ks_detect_rate = 0.0;    // fraction of uncensored runs
    double mean_shift_detect_rate = 0.0;
};

/// Mean post-change samples until each detector first fires, censored at
/// 10 * n_T.  Both detectors scan the same sample paths, so the reported
/// difference is paired.
inline DelayResult detection_delay_experiment(const DetectorCalibration& cal, double shift,
                                              double sigma, long long replications,
                                              std::uint64_t base_seed = 1,
                                              double sigma_ratio = 1.0) {
    if (replications < 1)
        throw std::invalid_argument("detection_delay_experiment: replications must be >= 1");
    if (!(sigma >= 0.0) || !(sigma_ratio > 0.0))
        throw std::invalid_argument("detection_delay_experiment: bad noise parameters");

    const auto n = static_cast<std::size_t>(cal.test_window);
    const auto m = static_cast<std::size_t>(cal.estimate_window);
    const long long censor = 10 * cal.test_window;

    DelayResult res;
    res.censor_limit = censor;
    double ks_total = 0.0, mean_total = 0.0;
    long long ks_hits = 0, mean_hits = 0;

    for (long long r = 0; r < replications; ++r) {
        std::mt19937_64 rng(base_seed + static_cast<std::uint64_t>(r));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> pre(n + m);
        for (auto& x : pre) x = sigma * normal(rng);
        std::vector<double> post(static_cast<std::size_t>(censor));
        for (auto& x : post) x = shift + sigma * sigma_ratio * normal(rng);

        long long ks_delay = censor, mean_delay = censor;
        RewardCache cache(1);
        for (const double x : pre) cache.append(0, x);
        for (long long d = 1; d <= censor; ++d) {
            cache.append(0, post[static_cast<std::size_t>(d - 1)]);
            if (ks_delay == censor && check_change(cache, 0, cal).changed) ks_delay = d;
            if (mean_delay == censor && mean_shift_check(cache, 0, cal).changed) mean_delay = d;
            if (ks_delay < censor && mean_delay < censor) break;
        }
        ks_total += static_cast<double>(ks_delay);
        mean_total += static_cast<double>(mean_delay);
        if (ks_delay < censor) ++ks_hits;
        if (mean_delay < censor) ++mean_hits;
    }

    const double reps = static_cast<double>(replications);
    res.ks_mean_delay = ks_total / reps;
    res.mean_shift_mean_delay = mean_total / reps;
    res.delay_difference = res.ks_mean_delay - res.mean_shift_mean_delay;
    res.ks_detect_rate = static_cast<double>(ks_hits) / reps;
    res.mean_shift_detect_rate = static_cast<double>(mean_hits) / reps;
    return res;
}

} // namespace tsks
