#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tsks/calibration.hpp"

TEST_CASE("t_ref matches the direct formula") {
    CHECK(tsks::compute_t_ref(34, 0.05) ==
          doctest::Approx(0.23291248842941292).epsilon(1e-12));
    CHECK(tsks::compute_t_ref(10, 0.05) ==
          doctest::Approx(std::sqrt(std::log(40.0) / 20.0)).epsilon(1e-12));
    CHECK_THROWS(tsks::compute_t_ref(0, 0.05));
    CHECK_THROWS(tsks::compute_t_ref(10, 0.0));
    CHECK_THROWS(tsks::compute_t_ref(10, 1.0));
}

TEST_CASE("estimate window: worked value and monotonicity") {
    CHECK(tsks::compute_estimate_window(0.1, 0.05) == 185);
    CHECK(tsks::compute_estimate_window(0.05, 0.05) == 738);
    // tighter tolerance or confidence never shrinks the window
    CHECK(tsks::compute_estimate_window(0.05, 0.05) >= tsks::compute_estimate_window(0.1, 0.05));
    CHECK(tsks::compute_estimate_window(0.1, 0.01) >= tsks::compute_estimate_window(0.1, 0.05));
    CHECK_THROWS(tsks::compute_estimate_window(0.0, 0.05));
    CHECK_THROWS(tsks::compute_estimate_window(0.1, 1.5));
}

TEST_CASE("test window: worked value and direct re-evaluation") {
    CHECK(tsks::compute_test_window(0.05, 0.1, 0.5, 1.5, 1.0) == 34);
    // independent direct evaluation of the same bound
    const double detectable = 0.1 * (1.5 - 0.5) + 0.5;
    const double e = std::erf(detectable / (2.0 * std::sqrt(2.0)));
    const long long direct = static_cast<long long>(std::ceil(std::log(40.0) / (2.0 * e * e)));
    CHECK(tsks::compute_test_window(0.05, 0.1, 0.5, 1.5, 1.0) == direct);
    CHECK_THROWS(tsks::compute_test_window(0.05, 0.0, 0.0, 0.0, 1.0));
}

TEST_CASE("warmup: worked value, fallback floor, and direct re-evaluation") {
    CHECK(tsks::compute_warmup(0.5, 185) == 5634);
    const double g2 = 0.25;
    const double direct = 160.0 / g2 * std::log(80.0 / g2) +
                          2.0 * (48.0 / (g2 * g2) + 18.0 + 185.0);
    CHECK(static_cast<double>(tsks::compute_warmup(0.5, 185)) ==
          doctest::Approx(std::ceil(direct)));
    CHECK(tsks::compute_warmup_fallback(185) == 370);
    // the warmup can never undercut the 2N floor
    CHECK(tsks::compute_warmup(1e6, 50) >= tsks::compute_warmup_fallback(50));
    CHECK_THROWS(tsks::compute_warmup(0.0, 10));
}

TEST_CASE("admissible change rate: worked value") {
    CHECK(tsks::max_change_rate(34, 5634, 0.1) ==
          doctest::Approx(1.858865837294043e-05).epsilon(1e-12));
    // direct re-evaluation
    CHECK(tsks::max_change_rate(34, 5634, 0.1) ==
          doctest::Approx(std::log(1.0 / 0.9) / 5668.0).epsilon(1e-12));
    CHECK_THROWS(tsks::max_change_rate(0, 10, 0.1));
    CHECK_THROWS(tsks::max_change_rate(10, 10, 0.0));
}

TEST_CASE("calibrate chains the lemmas: worked example end to end") {
    const auto c = tsks::DetectorCalibration::calibrate(0.05, 0.1, 0.05, 0.1, 0.5, 1.5, 0.5, 1.0,
                                                        0.1, tsks::WarmupRule::lemma);
    CHECK(c.test_window == 34);
    CHECK(c.t_ref == doctest::Approx(0.23292).epsilon(1e-4));
    CHECK(c.estimate_window == 185);
    CHECK(c.warmup_plays == 5634);
    CHECK(c.max_change_rate == doctest::Approx(1.859e-5).epsilon(1e-4));
}

TEST_CASE("calibrate default tolerance is t_ref/2 and fallback warmup is 2N") {
    const auto c = tsks::DetectorCalibration::calibrate(0.05, 0.1, 0.05, 0.1, 0.5, 1.5, 0.5, 0.5,
                                                        std::nan(""), tsks::WarmupRule::fallback);
    CHECK(c.test_window == 10);
    CHECK(c.estimate_window == tsks::compute_estimate_window(c.t_ref / 2.0, 0.05));
    CHECK(c.estimate_window == 40);
    CHECK(c.warmup_plays == 80);
}

TEST_CASE("calibration serializes and round-trips") {
    const auto c = tsks::DetectorCalibration::calibrate(0.05, 0.1, 0.05, 0.1, 0.5, 1.5, 0.5, 1.0,
                                                        0.1, tsks::WarmupRule::lemma);
    const auto r = tsks::DetectorCalibration::deserialize(c.serialize());
    CHECK(r.test_window == c.test_window);
    CHECK(r.estimate_window == c.estimate_window);
    CHECK(r.warmup_plays == c.warmup_plays);
    CHECK(r.t_ref == c.t_ref);
    CHECK(r.max_change_rate == c.max_change_rate);
    CHECK(r.sigma == c.sigma);
    CHECK_THROWS(tsks::DetectorCalibration::deserialize("p_loc=0.05\n"));
}
