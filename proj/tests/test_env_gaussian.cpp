#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsks/env/gaussian_env.hpp"

TEST_CASE("parameter validation") {
    tsks::GaussianEnvParams p;
    p.arms = 0;
    CHECK_THROWS(p.validate());
    p = {};
    p.delta_max = 0.1;  // below delta_min
    CHECK_THROWS(p.validate());
    p = {};
    p.mu_min = 3.9;  // support narrower than the required gap
    CHECK_THROWS(p.validate());
    p = {};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("means respect the support bounds and the pairwise gap at all times") {
    tsks::GaussianEnvParams p;
    p.change_rate = 1.0 / 20.0;  // frequent changes
    tsks::PiecewiseGaussianEnv env(p, 3);
    for (int n = 0; n < 2000; ++n) {
        env.step(static_cast<std::size_t>(n % 2));
        const auto& m = env.means();
        REQUIRE(m.size() == 2);
        CHECK(m[0] >= p.mu_min);
        CHECK(m[0] <= p.mu_max);
        CHECK(m[1] >= p.mu_min);
        CHECK(m[1] <= p.mu_max);
        CHECK(std::abs(m[0] - m[1]) >= p.delta_mu);
    }
}

TEST_CASE("step outcome: oracle is the best mean, chosen is the played arm's mean") {
    tsks::GaussianEnvParams p;
    p.change_rate = 0.0;  // stationary
    tsks::PiecewiseGaussianEnv env(p, 9);
    const auto means = env.means();
    const double best = std::max(means[0], means[1]);
    for (std::size_t arm : {0u, 1u}) {
        const auto out = env.step(arm);
        CHECK(out.oracle_mean == doctest::Approx(best));
        CHECK(out.chosen_mean == doctest::Approx(means[arm]));
        CHECK(out.oracle_arm == (means[0] >= means[1] ? 0u : 1u));
        CHECK_FALSE(out.change_occurred);
        CHECK_FALSE(out.binary_reward.has_value());
    }
    CHECK_THROWS_AS(env.step(2), std::out_of_range);
}

TEST_CASE("sigma=0 rewards equal the means exactly") {
    tsks::GaussianEnvParams p;
    p.sigma = 0.0;
    p.change_rate = 0.0;
    tsks::PiecewiseGaussianEnv env(p, 4);
    for (int i = 0; i < 20; ++i) {
        const auto out = env.step(static_cast<std::size_t>(i % 2));
        CHECK(out.raw_reward == doctest::Approx(out.chosen_mean));
    }
}

TEST_CASE("inter-change gaps average 1/lambda_C within 10%") {
    tsks::GaussianEnvParams p;
    p.change_rate = 1.0 / 300.0;
    tsks::PiecewiseGaussianEnv env(p, 12345);
    long long changes = 0, steps = 0;
    while (changes < 10000) {
        ++steps;
        if (env.step(0).change_occurred) ++changes;
    }
    const double mean_gap = static_cast<double>(steps) / static_cast<double>(changes);
    CHECK(mean_gap == doctest::Approx(300.0).epsilon(0.1));
}

TEST_CASE("hidden trajectory does not depend on the chosen arms") {
    tsks::GaussianEnvParams p;
    p.change_rate = 1.0 / 50.0;
    tsks::PiecewiseGaussianEnv a(p, 77), b(p, 77);
    for (int n = 0; n < 3000; ++n) {
        const auto oa = a.step(0);
        const auto ob = b.step(1);  // different arm every step
        CHECK(oa.change_occurred == ob.change_occurred);
        CHECK(oa.oracle_mean == ob.oracle_mean);
        // identical noise draw: rewards differ by exactly the mean gap
        CHECK(oa.raw_reward - oa.chosen_mean ==
              doctest::Approx(ob.raw_reward - ob.chosen_mean).epsilon(1e-12));
    }
}

TEST_CASE("same seed reproduces the reward stream bit for bit") {
    tsks::GaussianEnvParams p;
    tsks::PiecewiseGaussianEnv a(p, 5), b(p, 5);
    for (int n = 0; n < 1000; ++n) {
        const auto arm = static_cast<std::size_t>((n * 7) % 2);
        CHECK(a.step(arm).raw_reward == b.step(arm).raw_reward);
    }
}

TEST_CASE("infeasible change configuration raises") {
    tsks::GaussianEnvParams p;
    p.mu_min = 0.0;
    p.mu_max = 1.1;
    p.delta_mu = 0.1;
    p.delta_min = 5.0;  // any shift leaves the support
    p.delta_max = 6.0;
    p.change_rate = 1.0;
    tsks::PiecewiseGaussianEnv env(p, 8);
    CHECK_THROWS_WITH_AS(
        [&] {
            for (int i = 0; i < 10; ++i) env.step(0);
        }(),
        "PiecewiseGaussianEnv: infeasible change configuration", std::runtime_error);
}
