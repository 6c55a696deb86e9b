#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tsks/calibration.hpp"
#include "tsks/ecdf.hpp"

namespace {

// Independent oracle: counts at every candidate point, including the
// left-limit side of each step.
double brute_force_ks(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> points = a;
    points.insert(points.end(), b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    for (const double z : points) {
        double ra = 0, la = 0, rb = 0, lb = 0;
        for (const double x : a) {
            if (x <= z) ++ra;
            if (x < z) ++la;
        }
        for (const double x : b) {
            if (x <= z) ++rb;
            if (x < z) ++lb;
        }
        d = std::max(d, std::abs(ra / na - rb / nb));
        d = std::max(d, std::abs(la / na - lb / nb));
    }
    return d;
}

} // namespace

TEST_CASE("Ecdf evaluates right-continuously with left limits") {
    tsks::Ecdf e({3.0, 1.0, 2.0, 2.0});
    CHECK(e.eval(0.5) == 0.0);
    CHECK(e.eval(1.0) == doctest::Approx(0.25));
    CHECK(e.eval_left(1.0) == 0.0);
    CHECK(e.eval(2.0) == doctest::Approx(0.75));
    CHECK(e.eval_left(2.0) == doctest::Approx(0.25));
    CHECK(e.eval(3.0) == 1.0);
    CHECK(e.eval(99.0) == 1.0);
}

TEST_CASE("Ecdf rejects empty samples") {
    CHECK_THROWS(tsks::Ecdf(std::vector<double>{}));
}

TEST_CASE("ks_two_sample: identical samples have zero distance") {
    const std::vector<double> a{0.3, 1.2, 2.2, 5.0};
    CHECK(tsks::ks_two_sample(a, a).distance == 0.0);
}

TEST_CASE("ks_two_sample: disjoint supports have distance one") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{10.0, 11.0};
    const auto r = tsks::ks_two_sample(a, b);
    CHECK(r.distance == doctest::Approx(1.0));
    CHECK(r.n == 3);
    CHECK(r.m == 2);
}

TEST_CASE("ks_two_sample: frozen hand example with ties across samples") {
    // F_a jumps at {0.1, 0.4, 0.8}; F_b at {0.2, 0.3, 0.9, 1.5};
    // the supremum 0.5 is attained at z = 0.8.
    const std::vector<double> a{0.1, 0.4, 0.8};
    const std::vector<double> b{0.2, 0.3, 0.9, 1.5};
    const auto r = tsks::ks_two_sample(a, b);
    CHECK(r.distance == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.scaled_statistic == doctest::Approx(0.6546536707079771).epsilon(1e-12));
}

TEST_CASE("ks_two_sample: supremum attained only at a left limit") {
    // Same atoms in both samples but shifted mass: the sup lives strictly
    // between sample points of one ECDF.
    const std::vector<double> a{1.0, 1.0, 5.0};
    const std::vector<double> b{1.0, 5.0, 5.0};
    const auto r = tsks::ks_two_sample(a, b);
    CHECK(r.distance == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ks_two_sample matches the brute-force oracle on random pairs") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> size(1, 60);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> lattice(0, 4);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> a(size(rng)), b(size(rng));
        const bool ties = rep % 3 == 0;  // lattice-valued draws force ties
        for (auto& x : a) x = ties ? lattice(rng) : normal(rng);
        for (auto& x : b) x = ties ? lattice(rng) : normal(rng);
        const double got = tsks::ks_two_sample(a, b).distance;
        CHECK(got == doctest::Approx(brute_force_ks(a, b)).epsilon(1e-13));
    }
}

TEST_CASE("dkwm_tail: value, cap, and monotonicity") {
    CHECK_THROWS(tsks::dkwm_tail(10, 0.0));
    CHECK(tsks::dkwm_tail(10, 1e-9) == 1.0);  // capped at one
    CHECK(tsks::dkwm_tail(100, 0.1) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-15));
    double prev = 1.0;
    for (double t = 0.01; t < 1.0; t += 0.05) {
        const double v = tsks::dkwm_tail(50, t);
        CHECK(v <= prev);
        prev = v;
    }
    for (std::size_t n : {5u, 50u, 500u})
        CHECK(tsks::dkwm_tail(n, 0.2) >= tsks::dkwm_tail(n * 10, 0.2));
}

TEST_CASE("threshold and DKWM tail round-trip: dkwm_tail(n, t_ref(n, p)) = p") {
    for (long long n : {5LL, 34LL, 200LL, 5000LL})
        for (double p : {0.01, 0.05, 0.2}) {
            const double t = tsks::compute_t_ref(n, p);
            CHECK(tsks::dkwm_tail(static_cast<std::size_t>(n), t) ==
                  doctest::Approx(p).epsilon(1e-12));
        }
}
