#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

// Scalar special functions used by the calibration formulas: the error
// function pair, the Gaussian Q-function, their inverses, and the
// regularized incomplete gamma functions.

namespace tsks {

inline double erf(double x) { return std::erf(x); }

inline double erfc(double x) { return std::erfc(x); }

/// Inverse of erf on (-1, 1), solved by Newton iteration with a bisection
/// safeguard. Accurate to ~1e-15 absolute over (-0.999, 0.999).
inline double erf_inverse(double p) {
    if (!(p > -1.0 && p < 1.0))
        throw std::domain_error("erf_inverse: argument must lie in (-1, 1)");
    if (p == 0.0) return 0.0;
    if (p < 0.0) return -erf_inverse(-p);

    // Initial guess (Winitzki approximation), then polish.
    const double a = 0.147;
    const double ln1mp2 = std::log(1.0 - p * p);
    const double t = 2.0 / (M_PI * a) + ln1mp2 / 2.0;
    double x = std::sqrt(std::sqrt(t * t - ln1mp2 / a) - t);

    double lo = 0.0, hi = std::numeric_limits<double>::max();
    const double two_over_sqrt_pi = 2.0 / std::sqrt(M_PI);
    for (int it = 0; it < 100; ++it) {
        const double f = std::erf(x) - p;
        if (f > 0.0) hi = x; else lo = x;
        const double step = f / (two_over_sqrt_pi * std::exp(-x * x));
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + std::min(hi, lo + 1.0) );
        if (std::abs(next - x) <= 1e-16 * (1.0 + std::abs(x))) { x = next; break; }
        x = next;
    }
    return x;
}

/// Gaussian tail probability Q(x) = P(Z > x) for Z ~ N(0,1).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Inverse of q_function on (0, 1).
inline double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("q_inverse: argument must lie in (0, 1)");
    return std::sqrt(2.0) * erf_inverse(1.0 - 2.0 * p);
}

namespace detail {

// Regularized lower incomplete gamma via its power series; valid for x < s+1.
inline double gamma_p_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    double ap = s;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(s * std::log(x) - x - std::lgamma(s));
}

// Regularized upper incomplete gamma via Lentz's continued fraction; x >= s+1.
inline double gamma_q_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(s * std::log(x) - x - std::lgamma(s));
}

} // namespace detail

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
inline double gamma_p(double s, double x) {
    if (!(s > 0.0) || x < 0.0)
        throw std::domain_error("gamma_p: require s > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return detail::gamma_p_series(s, x);
    return 1.0 - detail::gamma_q_cf(s, x);
}

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
inline double gamma_q(double s, double x) {
    if (!(s > 0.0) || x < 0.0)
        throw std::domain_error("gamma_q: require s > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
    return detail::gamma_q_cf(s, x);
}

/// Ceiling that snaps values within 1e-9 of an integer down to it, so that
/// bounds evaluating to an exact integer are not inflated by roundoff.
inline long long ceil_bound(double v) {
    const double r = std::nearbyint(v);
    if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<long long>(r);
    return static_cast<long long>(std::ceil(v));
}

} // namespace tsks
