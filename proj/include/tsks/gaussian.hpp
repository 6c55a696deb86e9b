#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "tsks/math.hpp"

// Closed-form Kolmogorov distances between Gaussian distributions.

namespace tsks {

struct GaussianSpec {
    double mean = 0.0;
    double std_dev = 1.0;

    GaussianSpec() = default;
    GaussianSpec(double m, double s) : mean(m), std_dev(s) {
        if (!(std_dev > 0.0)) throw std::invalid_argument("GaussianSpec: std_dev must be positive");
    }

    double cdf(double x) const {
        return 0.5 * (1.0 + std::erf((x - mean) / (std_dev * std::sqrt(2.0))));
    }
};

struct GaussianKsPoint {
    double distance = 0.0;
    double argmax = 0.0;
};

/// Kolmogorov distance between two Gaussians with a shared standard
/// deviation: erf(|mu_a - mu_b| / (2*sqrt(2)*sigma)), attained at the
/// midpoint of the means.
inline GaussianKsPoint gaussian_ks_equal_var(const GaussianSpec& before, const GaussianSpec& after) {
    if (before.std_dev != after.std_dev)
        throw std::invalid_argument(
            "gaussian_ks_equal_var: std_devs differ; use gaussian_ks_general");
    const double sigma = before.std_dev;
    GaussianKsPoint p;
    p.distance = std::erf(std::abs(before.mean - after.mean) / (2.0 * std::sqrt(2.0) * sigma));
    p.argmax = 0.5 * (before.mean + after.mean);
    return p;
}

namespace detail {

// Both density-crossing points of two Gaussians with distinct variances.
inline std::pair<double, double> gaussian_crossings(const GaussianSpec& a, const GaussianSpec& b) {
    const double s1 = a.std_dev, s2 = b.std_dev, m1 = a.mean, m2 = b.mean;
    const double dm = m2 - m1;
    const double dv = s1 * s1 - s2 * s2;
    const double radicand = dm * dm + 2.0 * dv * std::log(s1 / s2);
    const double y1 = s1 * s2 * std::sqrt(std::max(0.0, radicand));
    const double x_plus = m1 + (s1 * s1 * dm - y1) / dv;
    const double x_minus = m1 + (s1 * s1 * dm + y1) / dv;
    return {x_plus, x_minus};
}

inline double gaussian_ks_grid(const GaussianSpec& a, const GaussianSpec& b) {
    const double lo = std::min(a.mean - 10.0 * a.std_dev, b.mean - 10.0 * b.std_dev);
    const double hi = std::max(a.mean + 10.0 * a.std_dev, b.mean + 10.0 * b.std_dev);
    const int n = 200000;
    double d = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / n;
        d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
    }
    return d;
}

} // namespace detail

/// Kolmogorov distance between two Gaussians with distinct standard
/// deviations, evaluated at the density-crossing points. Strictly positive
/// even when the means coincide. Falls back to a grid search when the
/// variances are too close for the closed form to be well conditioned.
inline double gaussian_ks_general(const GaussianSpec& before, const GaussianSpec& after) {
    if (!(before.std_dev > 0.0) || !(after.std_dev > 0.0))
        throw std::invalid_argument("gaussian_ks_general: std_dev must be positive");
    if (before.std_dev == after.std_dev)
        return gaussian_ks_equal_var(before, after).distance;

    const double v1 = before.std_dev * before.std_dev;
    const double v2 = after.std_dev * after.std_dev;
    if (std::abs(v1 - v2) < 1e-6 * std::max(v1, v2)) {
        // Cancellation in (sigma_l^2 - sigma_{l+1}^2) makes the crossing
        // points unreliable here.
        return detail::gaussian_ks_grid(before, after);
    }

    const auto [xa, xb] = detail::gaussian_crossings(before, after);
    const double da = std::abs(before.cdf(xa) - after.cdf(xa));
    const double db = std::abs(before.cdf(xb) - after.cdf(xb));
    return std::max(da, db);
}

} // namespace tsks
