#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsks/calibration.hpp"
#include "tsks/ecdf.hpp"

// Online change detectors over per-arm reward caches: the KS-based detector
// and a mean-shift baseline.

namespace tsks {

/// Append-only per-arm reward sequences, chronological since the last reset.
class RewardCache {
public:
    explicit RewardCache(std::size_t arms) : rewards_(arms) {}

    void append(std::size_t arm, double reward) { at(arm).push_back(reward); }

    std::size_t length(std::size_t arm) const { return at(arm).size(); }

    std::size_t arms() const { return rewards_.size(); }

    /// Last `count` rewards of the arm.
    std::span<const double> tail(std::size_t arm, std::size_t count) const {
        const auto& v = at(arm);
        if (count > v.size()) throw std::out_of_range("RewardCache: tail longer than cache");
        return {v.data() + (v.size() - count), count};
    }

    /// `count` rewards immediately preceding the last `skip` rewards.
    std::span<const double> window_before_tail(std::size_t arm, std::size_t count,
                                               std::size_t skip) const {
        const auto& v = at(arm);
        if (count + skip > v.size()) throw std::out_of_range("RewardCache: window exceeds cache");
        return {v.data() + (v.size() - skip - count), count};
    }

    void reset() {
        for (auto& v : rewards_) v.clear();
    }

private:
    std::vector<double>& at(std::size_t arm) {
        if (arm >= rewards_.size()) throw std::out_of_range("RewardCache: bad arm index");
        return rewards_[arm];
    }
    const std::vector<double>& at(std::size_t arm) const {
        if (arm >= rewards_.size()) throw std::out_of_range("RewardCache: bad arm index");
        return rewards_[arm];
    }

    std::vector<std::vector<double>> rewards_;
};

struct DetectionOutcome {
    bool changed = false;
    double distance = 0.0;
    double threshold_used = 0.0;
    std::size_t arm_checked = 0;
};

/// KS detector: test window = last n_T rewards of the arm, estimate window
/// = the N rewards before those; fires when the raw Kolmogorov distance
/// exceeds t_ref.
inline DetectionOutcome check_change(const RewardCache& cache, std::size_t arm,
                                     const DetectorCalibration& cal) {
    const auto n = static_cast<std::size_t>(cal.test_window);
    const auto m = static_cast<std::size_t>(cal.estimate_window);
    if (cache.length(arm) < n + m) throw std::runtime_error("check_change: warmup incomplete");
    const auto test = cache.tail(arm, n);
    const auto estimate = cache.window_before_tail(arm, m, n);
    const auto ks = ks_two_sample(test, estimate);
    DetectionOutcome out;
    out.distance = ks.distance;
    out.threshold_used = cal.t_ref;
    out.changed = ks.distance > cal.t_ref;
    out.arm_checked = arm;
    return out;
}

/// Mean-shift baseline on the same windows; fires when the window means
/// differ by more than delta_min/2.
inline DetectionOutcome mean_shift_check(const RewardCache& cache, std::size_t arm,
                                         const DetectorCalibration& cal) {
    const auto n = static_cast<std::size_t>(cal.test_window);
    const auto m = static_cast<std::size_t>(cal.estimate_window);
    if (cache.length(arm) < n + m) throw std::runtime_error("mean_shift_check: warmup incomplete");
    const auto test = cache.tail(arm, n);
    const auto estimate = cache.window_before_tail(arm, m, n);
    const double mt = std::accumulate(test.begin(), test.end(), 0.0) / static_cast<double>(n);
    const double me = std::accumulate(estimate.begin(), estimate.end(), 0.0) / static_cast<double>(m);
    DetectionOutcome out;
    out.distance = std::abs(mt - me);
    out.threshold_used = cal.delta_min / 2.0;
    out.changed = out.distance > out.threshold_used;
    out.arm_checked = arm;
    return out;
}

} // namespace tsks
