#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

// Empirical CDFs, the exact two-sample Kolmogorov distance, and the
// DKWM tail bound.

namespace tsks {

/// Right-continuous step function built from a sample.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> values) : samples_(std::move(values)) {
        if (samples_.empty()) throw std::invalid_argument("Ecdf: empty sample");
        std::sort(samples_.begin(), samples_.end());
    }

    /// Fraction of samples <= x.
    double eval(double x) const {
        const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
        return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
    }

    /// Left limit: fraction of samples strictly below x.
    double eval_left(double x) const {
        const auto it = std::lower_bound(samples_.begin(), samples_.end(), x);
        return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
    }

    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }

private:
    std::vector<double> samples_;
};

inline Ecdf build_ecdf(std::span<const double> values) {
    return Ecdf(std::vector<double>(values.begin(), values.end()));
}

struct KsTwoSampleResult {
    double distance = 0.0;          // sup_z |F_test(z) - F_estimate(z)|
    double scaled_statistic = 0.0;  // sqrt(n*m/(n+m)) * distance
    std::size_t n = 0;              // test sample count
    std::size_t m = 0;              // estimate sample count
};

/// Exact two-sample Kolmogorov distance. The supremum of a difference of
/// step functions is attained at a sample point; both one-sided limits are
/// checked so ties between the two samples are handled correctly.
inline KsTwoSampleResult ks_two_sample(const Ecdf& test, const Ecdf& estimate) {
    double d = 0.0;
    for (const std::vector<double>* s : {&test.samples(), &estimate.samples()}) {
        for (double x : *s) {
            d = std::max(d, std::abs(test.eval(x) - estimate.eval(x)));
            d = std::max(d, std::abs(test.eval_left(x) - estimate.eval_left(x)));
        }
    }
    KsTwoSampleResult r;
    r.n = test.size();
    r.m = estimate.size();
    r.distance = d;
    const double n = static_cast<double>(r.n), m = static_cast<double>(r.m);
    r.scaled_statistic = std::sqrt(n * m / (n + m)) * d;
    return r;
}

inline KsTwoSampleResult ks_two_sample(std::span<const double> test,
                                       std::span<const double> estimate) {
    return ks_two_sample(build_ecdf(test), build_ecdf(estimate));
}

/// DKWM tail bound 2*exp(-2*n*t^2), capped at 1.
inline double dkwm_tail(std::size_t sample_count, double threshold) {
    if (sample_count == 0) throw std::invalid_argument("dkwm_tail: need at least one sample");
    if (!(threshold > 0.0)) throw std::invalid_argument("dkwm_tail: threshold must be positive");
    const double v = 2.0 * std::exp(-2.0 * static_cast<double>(sample_count) * threshold * threshold);
    return std::min(1.0, v);
}

} // namespace tsks
