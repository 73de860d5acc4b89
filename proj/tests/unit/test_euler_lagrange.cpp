#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bbm/euler_lagrange.hpp"
#include "bbm/io.hpp"

namespace bbm {
namespace {

const PotentialParams kUnit = make_params(1.0, 1.0);

double max_gap(const OptimalPathResult& r, const std::function<double(double)>& exact) {
    double gap = 0.0;
    for (std::size_t i = 0; i < r.path.size(); ++i)
        gap = std::max(gap, std::abs(r.path.values[i] - exact(r.path.grid[i])));
    return gap;
}

TEST(Frontier, Examples) {
    EXPECT_DOUBLE_EQ(frontier(kUnit, 0.6), 0.18);
    EXPECT_DOUBLE_EQ(frontier_endpoint(kUnit), 0.5);
    EXPECT_NEAR(frontier_endpoint(make_params(1.0, 0.0)), std::sqrt(2.0), 1e-15);
    for (double p : {0.0, 0.7, 1.9}) EXPECT_EQ(frontier(make_params(2.0, p), 0.0), 0.0);
    const auto path = frontier_path(kUnit, uniform_grid(8));
    EXPECT_DOUBLE_EQ(path.values[4], 0.125);
}

TEST(Unconstrained, ClosedFormAtOptimalEndpoint) {
    const auto r = solve_unconstrained(kUnit, 0.5);
    EXPECT_LT(max_gap(r, [](double s) { return -s * s / 2 + s; }), 1e-9);
    EXPECT_NEAR(r.K_value, 1.0 / 6.0, 1e-10);
    EXPECT_NEAR(r.endpoint_deriv, 0.0, 1e-8);
    EXPECT_EQ(r.s_switch, 0.0);
}

TEST(Unconstrained, ClosedFormAtQuarter) {
    const auto r = solve_unconstrained(kUnit, 0.25);
    EXPECT_LT(max_gap(r, [](double s) { return -s * s / 2 + 0.75 * s; }), 1e-9);
    EXPECT_NEAR(r.K_value, 1.0 / 24 + 1.0 / 8 - 1.0 / 32, 1e-10);
    EXPECT_NEAR(r.endpoint_deriv, -0.25, 1e-8);
}

TEST(Unconstrained, PeakedPathAtZero) {
    const auto r = solve_unconstrained(kUnit, 0.0);
    EXPECT_NEAR(evaluate_path(r, 0.5), 0.125, 1e-10);
    EXPECT_NEAR(r.K_value, 1.0 / 24, 1e-10);
    EXPECT_NEAR(r.geometry.peak * r.geometry.scale, 0.125, 1e-10);
}

TEST(Constrained, ClosedFormAtQuarter) {
    const auto r = solve_constrained(kUnit, 0.25);
    EXPECT_NEAR(r.s_switch, 0.5, 1e-10);
    EXPECT_LT(max_gap(r, [](double s) { return s <= 0.5 ? s * s / 2 : -s * s / 2 + s - 0.25; }), 1e-9);
    EXPECT_NEAR(r.K_value, 1.0 / 12, 1e-10);
}

TEST(Constrained, FrontierEndpointFollowsFrontier) {
    const auto r = solve_constrained(kUnit, 0.5);
    EXPECT_NEAR(r.s_switch, 1.0, 1e-10);
    EXPECT_LT(max_gap(r, [](double s) { return s * s / 2; }), 1e-9);
    EXPECT_NEAR(r.K_value, 0.0, 1e-10);
}

TEST(Constrained, ClosedFormAtZero) {
    const auto r = solve_constrained(kUnit, 0.0);
    EXPECT_NEAR(r.s_switch, 1.0 - 1.0 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(r.K_value, 0.5 - std::pow(2.0, 1.5) / 6.0, 1e-10);
    EXPECT_NEAR(r.energy_c, 2.0 * frontier(kUnit, r.s_switch), 1e-10);
}

TEST(Constrained, PeakIsTwoToTheOneOverPTimesSwitchHeight) {
    for (double p : {0.5, 1.0, 1.5}) {
        const auto params = make_params(1.0, p);
        const auto r = solve_constrained(params, 0.1 * frontier_endpoint(params));
        const double expected = std::pow(2.0, 1.0 / p) * frontier(params, r.s_switch);
        EXPECT_NEAR(r.geometry.peak * r.geometry.scale, expected, 1e-9 * expected) << "p=" << p;
    }
}

TEST(ZeroExponent, StraightLines) {
    const auto params = make_params(1.0, 0.0);
    for (double z : {0.0, 0.5, 1.2}) {
        for (const auto& r : {solve_unconstrained(params, z), solve_constrained(params, z)}) {
            EXPECT_NEAR(r.K_value, 1.0 - z * z / 2, 1e-14);
            EXPECT_NEAR(evaluate_path(r, 0.5), z / 2, 1e-14);
            EXPECT_NEAR(r.endpoint_deriv, z, 1e-14);
        }
    }
}

TEST(Errors, InvalidEndpoints) {
    EXPECT_THROW(solve_unconstrained(kUnit, -0.1), DomainError);
    EXPECT_THROW(solve_unconstrained(kUnit, std::nan("")), DomainError);
    EXPECT_THROW(solve_constrained(kUnit, 0.51), DomainError);
    EXPECT_THROW(solve_constrained(kUnit, -0.01), DomainError);
    try {
        solve_constrained(make_params(1.0, 0.0), 1.5);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("z = 1.5"), std::string::npos);
    }
}

TEST(Output, CsvAndJson) {
    const auto r = solve_constrained(kUnit, 0.25, uniform_grid(16));
    const auto table = io::parse_csv(result_to_csv(r, "run_digest=abc"));
    EXPECT_EQ(table.header, (std::vector<std::string>{"s", "f"}));
    EXPECT_EQ(table.rows.size(), 17u);
    EXPECT_DOUBLE_EQ(table.rows.back()[1], 0.25);
    const std::string json = result_to_json(r);
    for (const char* key : {"\"z\"", "\"s_switch\"", "\"energy_c\"", "\"K_value\"", "\"endpoint_deriv\"", "\"kind\""})
        EXPECT_NE(json.find(key), std::string::npos) << key;
}

class Sweep : public ::testing::TestWithParam<double> {};

TEST_P(Sweep, DiagnosticsHoldAcrossEndpoints) {
    const double p = GetParam();
    const auto params = make_params(1.3, p);
    const double zbar = frontier_endpoint(params);
    for (double frac : {0.0, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0}) {
        const double z = frac * zbar;
        const auto g = solve_constrained(params, z);
        const auto dg = diagnose(g);
        EXPECT_TRUE(dg.ok(PathKind::constrained)) << "g p=" << p << " z=" << z;
        EXPECT_LE(dg.endpoint_error, kBvpTolerance);
        EXPECT_LE(dg.c1_gap, 1e-6);
        EXPECT_LE(dg.frontier_excess, 1e-9);
        EXPECT_GE(dg.min_K, -1e-9);
        EXPECT_EQ(g.path.values.back(), z);
    }
    for (double frac : {0.0, 0.01, 0.3, 1.0, 3.0}) {
        const double z = frac * zbar;
        const auto h = solve_unconstrained(params, z);
        EXPECT_TRUE(diagnose(h).ok(PathKind::unconstrained)) << "h p=" << p << " z=" << z;
        for (std::size_t i = 1; i + 1 < h.path.size(); ++i) ASSERT_GT(h.path.values[i], 0.0);
    }
}

INSTANTIATE_TEST_SUITE_P(Exponents, Sweep, ::testing::Values(0.1, 0.25, 0.5, 1.0, 1.5, 1.9));

TEST(Property, MonotoneInEndpoint) {
    for (double p : {0.5, 1.0, 1.7}) {
        const auto params = make_params(1.0, p);
        const double zbar = frontier_endpoint(params);
        OptimalPathResult prev_g = solve_constrained(params, 0.0, uniform_grid(256));
        OptimalPathResult prev_h = solve_unconstrained(params, 0.0, uniform_grid(256));
        for (int k = 1; k <= 10; ++k) {
            const double z = zbar * k / 10.0;
            const auto g = solve_constrained(params, z, uniform_grid(256));
            const auto h = solve_unconstrained(params, 2.0 * z, uniform_grid(256));
            for (std::size_t i = 0; i < g.path.size(); ++i) {
                EXPECT_LE(prev_g.path.values[i], g.path.values[i] + 1e-9);
                EXPECT_LE(prev_h.path.values[i], h.path.values[i] + 1e-9);
            }
            prev_g = g;
            prev_h = h;
        }
    }
}

TEST(Property, ScalingCovariance) {
    const double lambda = 4.0;
    for (double p : {0.5, 1.0, 1.5}) {
        const auto base = make_params(1.0, p);
        const auto scaled = make_params(lambda, p);
        const double length = std::pow(lambda, 1.0 / (2.0 - p));
        const double rate = std::pow(lambda, 2.0 / (2.0 - p));
        for (double frac : {0.1, 0.6}) {
            const double z = frac * frontier_endpoint(base);
            const auto pairs = {std::pair{solve_constrained(base, z), solve_constrained(scaled, length * z)},
                                std::pair{solve_unconstrained(base, z), solve_unconstrained(scaled, length * z)}};
            for (const auto& [a, b] : pairs) {
                EXPECT_NEAR(b.K_value, rate * a.K_value, 1e-6 * std::abs(rate * a.K_value));
                for (std::size_t i = 0; i < a.path.size(); i += 64)
                    EXPECT_NEAR(b.path.values[i], length * a.path.values[i], 1e-6 * length * (z + 1e-3));
            }
        }
    }
}

TEST(Property, ConstrainedNeverBeatsUnconstrained) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> p_dist(0.05, 1.95), frac(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const auto params = make_params(0.5 + trial % 3, p_dist(rng));
        const double z = frac(rng) * frontier_endpoint(params);
        EXPECT_LE(solve_constrained(params, z, {}).K_value, solve_unconstrained(params, z, {}).K_value + 1e-12);
    }
}

}  // namespace
}  // namespace bbm
