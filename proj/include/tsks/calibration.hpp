#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tsks/math.hpp"

// Detector calibration: the sample-size and threshold bounds that tie the
// false-alarm, missed-detection, localisation and change-rate targets
// together.

namespace tsks {

/// Detection threshold for a test window of n samples at false-alarm level
/// p_f: t_ref = sqrt(ln(2/p_f) / (2n)).
inline double compute_t_ref(long long test_window, double p_false_alarm) {
    if (test_window < 1) throw std::invalid_argument("compute_t_ref: test_window must be >= 1");
    if (!(p_false_alarm > 0.0 && p_false_alarm < 1.0))
        throw std::invalid_argument("compute_t_ref: p_false_alarm must lie in (0, 1)");
    return std::sqrt(std::log(2.0 / p_false_alarm) / (2.0 * static_cast<double>(test_window)));
}

/// Smallest N with DKWM accuracy `tolerance` at confidence 1 - p_loc:
/// N >= ln(2/p_loc) / (2*tolerance^2).
inline long long compute_estimate_window(double tolerance, double p_loc) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("compute_estimate_window: tolerance must be positive");
    if (!(p_loc > 0.0 && p_loc < 1.0))
        throw std::invalid_argument("compute_estimate_window: p_loc must lie in (0, 1)");
    const long long n = ceil_bound(std::log(2.0 / p_loc) / (2.0 * tolerance * tolerance));
    return std::max<long long>(1, n);
}

/// Universal warmup fallback: with two arms, N plays of the optimal arm
/// need at least 2N total plays.
inline long long compute_warmup_fallback(long long estimate_window) {
    if (estimate_window < 1) throw std::invalid_argument("compute_warmup_fallback: estimate_window must be >= 1");
    return 2 * estimate_window;
}

/// Plays needed before the optimal arm has accumulated N samples:
/// T_N = (160/gap^2) ln(80/gap^2) + 2*(48/gap^4 + 18 + N), floored at 2N.
inline long long compute_warmup(double delta_mu, long long estimate_window) {
    if (!(delta_mu > 0.0)) throw std::invalid_argument("compute_warmup: delta_mu must be positive");
    if (estimate_window < 1) throw std::invalid_argument("compute_warmup: estimate_window must be >= 1");
    const double g2 = delta_mu * delta_mu;
    const double value = 160.0 / g2 * std::log(80.0 / g2) +
                         2.0 * (48.0 / (g2 * g2) + 18.0 + static_cast<double>(estimate_window));
    if (!std::isfinite(value) || value > 9.0e18)
        throw std::overflow_error("compute_warmup: infeasible (delta_mu too small)");
    return std::max(ceil_bound(value), compute_warmup_fallback(estimate_window));
}

/// Test-window bound: n_T = ln(2/p_f) / (2 erf^2((p_m (d_max - d_min) + d_min) / (2 sqrt(2) sigma))).
inline long long compute_test_window(double p_false_alarm, double p_missed, double delta_min,
                                     double delta_max, double sigma) {
    if (!(p_false_alarm > 0.0 && p_false_alarm < 1.0))
        throw std::invalid_argument("compute_test_window: p_false_alarm must lie in (0, 1)");
    if (!(p_missed >= 0.0 && p_missed <= 1.0))
        throw std::invalid_argument("compute_test_window: p_missed must lie in [0, 1]");
    if (delta_min < 0.0 || delta_max < delta_min)
        throw std::invalid_argument("compute_test_window: require 0 <= delta_min <= delta_max");
    if (!(sigma > 0.0)) throw std::invalid_argument("compute_test_window: sigma must be positive");
    const double detectable = p_missed * (delta_max - delta_min) + delta_min;
    if (!(detectable > 0.0))
        throw std::invalid_argument("compute_test_window: undetectable configuration");
    const double e = std::erf(detectable / (2.0 * std::sqrt(2.0) * sigma));
    const double value = std::log(2.0 / p_false_alarm) / (2.0 * e * e);
    if (!std::isfinite(value) || value > 9.0e18)
        throw std::overflow_error("compute_test_window: infeasible configuration");
    return std::max<long long>(1, ceil_bound(value));
}

/// Admissible change rate: lambda_A <= ln(1/(1-p_change)) / (n_T + T_N).
inline double max_change_rate(long long test_window, long long warmup, double p_change) {
    if (test_window < 1 || warmup < 1)
        throw std::invalid_argument("max_change_rate: windows must be positive");
    if (!(p_change > 0.0 && p_change < 1.0))
        throw std::invalid_argument("max_change_rate: p_change must lie in (0, 1)");
    return std::log(1.0 / (1.0 - p_change)) / static_cast<double>(test_window + warmup);
}

enum class WarmupRule { lemma, fallback };

struct DetectorCalibration {
    double p_false_alarm = 0.05;
    double p_missed = 0.1;
    double p_loc = 0.05;
    double p_change = 0.1;
    double delta_min = 0.5;
    double delta_max = 1.5;
    double delta_mu = 0.5;
    double sigma = 1.0;
    long long estimate_window = 0;  // N
    long long test_window = 0;      // n_T
    long long warmup_plays = 0;     // T_N
    double t_ref = 0.0;
    double max_change_rate = 0.0;   // lambda_A upper bound

    /// Chains the bound calculators: n_T -> t_ref -> N -> T_N -> lambda_A.
    /// `estimate_tolerance` is the DKWM accuracy target of the estimate
    /// window; when NaN it defaults to t_ref/2 so the threshold budget is
    /// split evenly between the two windows.
    static DetectorCalibration calibrate(double p_false_alarm, double p_missed, double p_loc,
                                         double p_change, double delta_min, double delta_max,
                                         double delta_mu, double sigma,
                                         double estimate_tolerance = std::nan(""),
                                         WarmupRule rule = WarmupRule::lemma) {
        DetectorCalibration c;
        c.p_false_alarm = p_false_alarm;
        c.p_missed = p_missed;
        c.p_loc = p_loc;
        c.p_change = p_change;
        c.delta_min = delta_min;
        c.delta_max = delta_max;
        c.delta_mu = delta_mu;
        c.sigma = sigma;
        c.test_window = compute_test_window(p_false_alarm, p_missed, delta_min, delta_max, sigma);
        c.t_ref = compute_t_ref(c.test_window, p_false_alarm);
        const double tol = std::isnan(estimate_tolerance) ? c.t_ref / 2.0 : estimate_tolerance;
        c.estimate_window = compute_estimate_window(tol, p_loc);
        c.warmup_plays = rule == WarmupRule::lemma ? compute_warmup(delta_mu, c.estimate_window)
                                                   : compute_warmup_fallback(c.estimate_window);
        c.max_change_rate = tsks::max_change_rate(c.test_window, c.warmup_plays, p_change);
        return c;
    }

    /// Flat key-value record, one `key=value` pair per line.
    std::string serialize() const {
        std::ostringstream os;
        os.precision(17);
        os << "p_false_alarm=" << p_false_alarm << '\n'
           << "p_missed=" << p_missed << '\n'
           << "p_loc=" << p_loc << '\n'
           << "p_change=" << p_change << '\n'
           << "delta_min=" << delta_min << '\n'
           << "delta_max=" << delta_max << '\n'
           << "delta_mu=" << delta_mu << '\n'
           << "sigma=" << sigma << '\n'
           << "estimate_window=" << estimate_window << '\n'
           << "test_window=" << test_window << '\n'
           << "warmup_plays=" << warmup_plays << '\n'
           << "t_ref=" << t_ref << '\n'
           << "max_change_rate=" << max_change_rate << '\n';
        return os.str();
    }

    static DetectorCalibration deserialize(const std::string& text) {
        std::map<std::string, std::string> kv;
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
        auto get = [&](const std::string& k) {
            const auto it = kv.find(k);
            if (it == kv.end())
                throw std::invalid_argument("DetectorCalibration: missing key " + k);
            return it->second;
        };
        DetectorCalibration c;
        c.p_false_alarm = std::stod(get("p_false_alarm"));
        c.p_missed = std::stod(get("p_missed"));
        c.p_loc = std::stod(get("p_loc"));
        c.p_change = std::stod(get("p_change"));
        c.delta_min = std::stod(get("delta_min"));
        c.delta_max = std::stod(get("delta_max"));
        c.delta_mu = std::stod(get("delta_mu"));
        c.sigma = std::stod(get("sigma"));
        c.estimate_window = std::stoll(get("estimate_window"));
        c.test_window = std::stoll(get("test_window"));
        c.warmup_plays = std::stoll(get("warmup_plays"));
        c.t_ref = std::stod(get("t_ref"));
        c.max_change_rate = std::stod(get("max_change_rate"));
        return c;
    }
};

} // namespace tsks
