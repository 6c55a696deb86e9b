#pragma once

#include <cmath>
#include <stdexcept>

#include "tsks/math.hpp"

// Regret-bound evaluation for the calibrated detector policy.

namespace tsks {

/// Probability that all three detection guarantees hold simultaneously:
/// (1 - p_loc)(1 - p_change)(1 - p_missed).
inline double total_confidence(double p_loc, double p_change, double p_missed) {
    for (double p : {p_loc, p_change, p_missed})
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("total_confidence: probabilities must lie in [0, 1]");
    return (1.0 - p_loc) * (1.0 - p_change) * (1.0 - p_missed);
}

/// Expected-regret bound shape (up to its big-O constant):
///   ln(T_N) * lambda_A * T * P(T/(T_N + n_T), lambda_A * T)
/// where P is the regularized lower incomplete gamma — the probability that
/// a Poisson(lambda_A*T) change count reaches T/(T_N + n_T), i.e. that
/// changes arrive faster than one detection cycle.  Evaluated in log space,
/// so it does not overflow for large T.
inline double regret_bound(double horizon, long long warmup, long long test_window,
                           double lambda_a) {
    if (!(horizon > 0.0) || warmup < 1 || test_window < 1 || !(lambda_a > 0.0))
        throw std::domain_error("regret_bound: all arguments must be positive");
    const double s = horizon / static_cast<double>(warmup + test_window);
    const double x = lambda_a * horizon;
    const double ratio = gamma_p(s, x);
    return std::log(static_cast<double>(warmup)) * lambda_a * horizon * ratio;
}

} // namespace tsks
