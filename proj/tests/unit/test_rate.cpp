#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bbm/euler_lagrange.hpp"
#include "bbm/quadrature.hpp"
#include "bbm/rate.hpp"
#include "random_paths.hpp"

namespace bbm {
namespace {

const PotentialParams kUnit = make_params(1.0, 1.0);

SampledPath line(double slope, std::size_t n = kDefaultGridIntervals) {
    return sample_path([slope](double s) { return slope * s; }, uniform_grid(n));
}

TEST(Rate, LinePathMatchesClosedForm) {
    // K(f, t) = t^2/2 - t/2 for f(s) = s.
    const auto curve = rate_functional(kUnit, line(1.0));
    for (std::size_t i = 0; i < curve.grid.size(); i += 97) {
        const double t = curve.grid[i];
        EXPECT_NEAR(curve.K_values[i], t * t / 2 - t / 2, 1e-14);
    }
    EXPECT_EQ(curve.K_values.front(), 0.0);
}

TEST(Rate, ExtinctionTimeExamples) {
    EXPECT_EQ(extinction_time(rate_functional(kUnit, frontier_path(kUnit))), kNeverExtinct);
    EXPECT_EQ(extinction_time(rate_functional(kUnit, line(1.0))), 0.0);
    // K(f, t) = t^2/4 - t/8 dips below zero immediately for f(s) = s/2.
    EXPECT_EQ(extinction_time(rate_functional(kUnit, line(0.5))), 0.0);
    EXPECT_EQ(extinction_time(rate_functional(kUnit, line(0.0))), kNeverExtinct);
}

TEST(Rate, ExtinctionTimeIsLastGridTimeBeforeTheDip) {
    // f = 0 until 1/2, then steep: K drops below zero right after s = 1/2.
    const auto path = sample_path([](double s) { return s <= 0.5 ? 0.0 : 40.0 * (s - 0.5); }, uniform_grid(64));
    EXPECT_DOUBLE_EQ(extinction_time(rate_functional(kUnit, path)), 0.5);
}

TEST(Rate, PresenceRateExamples) {
    const auto frontier_curve = rate_functional(kUnit, frontier_path(kUnit));
    EXPECT_EQ(presence_rate(frontier_curve, 1.0), 0.0);
    EXPECT_NEAR(frontier_curve.K_values.back(), 0.0, 1e-7);
    EXPECT_NEAR(presence_rate(rate_functional(kUnit, line(1.0)), 1.0), -0.125, 1e-14);
    EXPECT_EQ(presence_rate(rate_functional(kUnit, line(1.0)), 0.0), 0.0);
}

TEST(Rate, ZeroExponentCountsTimeOnly) {
    const auto params = make_params(2.0, 0.0);
    const auto curve = rate_functional(params, line(0.0));
    EXPECT_NEAR(curve.K_values.back(), 2.0, 1e-14);
}

TEST(Rate, LinearAbsPowIntegral) {
    EXPECT_DOUBLE_EQ(linear_abs_pow_integral(0.0, 1.0, 1.0, 1.0), 0.5);
    EXPECT_NEAR(linear_abs_pow_integral(-1.0, 1.0, 2.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(linear_abs_pow_integral(0.0, 1.0, 1.0, 0.5), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(linear_abs_pow_integral(-1.0, 3.0, 1.0, 1.5), (1.0 + std::pow(3.0, 2.5)) / 2.5 / 4.0, 1e-14);
    EXPECT_DOUBLE_EQ(linear_abs_pow_integral(2.0, 2.0, 0.5, 1.3), 0.5 * std::pow(2.0, 1.3));
}

TEST(Rate, InvalidPathsAreRejected) {
    SampledPath bad = line(1.0, 4);
    bad.values[0] = 0.1;
    EXPECT_THROW(check_path(bad), DomainError);
    bad = line(1.0, 4);
    bad.grid[2] = bad.grid[1];
    EXPECT_THROW(check_path(bad), DomainError);
    bad = line(1.0, 4);
    bad.grid.back() = 0.9;
    EXPECT_THROW(rate_functional(kUnit, bad), DomainError);
}

TEST(Rate, CsvRoundTrip) {
    std::mt19937_64 rng(3);
    const auto path = testing::random_rough_path(rng, 50);
    const auto back = path_from_csv(path_to_csv(path));
    EXPECT_EQ(back.grid, path.grid);
    EXPECT_EQ(back.values, path.values);
    EXPECT_NE(path_to_csv(path).rfind("t,f\n", 0), std::string::npos);
}

TEST(RateProperty, SymmetryUnderReflection) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> p_dist(0.0, 1.99);
    for (int trial = 0; trial < 50; ++trial) {
        const auto params = make_params(1.0 + trial % 3, p_dist(rng));
        auto f = trial % 2 ? testing::random_smooth_path(rng) : testing::random_rough_path(rng);
        auto g = f;
        for (double& v : g.values) v = -v;
        EXPECT_EQ(rate_functional(params, f).K_values, rate_functional(params, g).K_values);
    }
}

TEST(RateProperty, AdditivityAgainstIndependentQuadrature) {
    // Each increment K(t_j) - K(t_i) must equal the functional of the
    // piecewise-linear path restricted to [t_i, t_j], integrated here with
    // adaptive quadrature instead of the closed-form piece integrals.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> p_dist(0.05, 1.95);
    for (int trial = 0; trial < 20; ++trial) {
        const auto params = make_params(0.5 + trial % 4, p_dist(rng));
        const auto f = testing::random_rough_path(rng, 60);
        const auto curve = rate_functional(params, f);
        std::uniform_int_distribution<std::size_t> idx(0, f.size() - 1);
        std::size_t i = idx(rng), j = idx(rng);
        if (i > j) std::swap(i, j);
        double expected = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            const double h = f.grid[k + 1] - f.grid[k];
            const double slope = (f.values[k + 1] - f.values[k]) / h;
            const auto pot = quad::integrate(
                [&](double s) { return params.m_beta() * abs_pow(f.values[k] + slope * (s - f.grid[k]), params.p); },
                f.grid[k], f.grid[k + 1], 1e-15, 1e-13);
            expected += pot.value - 0.5 * slope * slope * h;
        }
        EXPECT_NEAR(curve.K_values[j] - curve.K_values[i], expected, 1e-11 * (1.0 + std::abs(expected)));
    }
}

TEST(RateProperty, RefinementOrderOnFrontier) {
    for (double p : {1.0, 1.5}) {
        const auto params = make_params(1.0, p);
        auto err = [&](std::size_t n) {
            return std::abs(rate_functional(params, frontier_path(params, uniform_grid(n))).K_values.back());
        };
        for (std::size_t n : {64u, 128u, 256u}) {
            const double order = std::log2(err(n) / err(2 * n));
            EXPECT_GE(order, 1.8) << "p=" << p << " n=" << n;
        }
    }
}

TEST(RateProperty, PresenceRateSignMatchesCurve) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = testing::random_smooth_path(rng, 256, 0.3);
        const auto curve = rate_functional(kUnit, f);
        for (double t : {0.25, 0.5, 1.0}) {
            const double rate = presence_rate(curve, t);
            EXPECT_LE(rate, 0.0);
            bool dips = false;
            for (std::size_t i = 0; i < curve.grid.size() && curve.grid[i] <= t; ++i)
                dips = dips || curve.K_values[i] < -kExtinctionTolerance;
            EXPECT_EQ(rate < -kExtinctionTolerance, dips);
        }
    }
}

}  // namespace
}  // namespace bbm
