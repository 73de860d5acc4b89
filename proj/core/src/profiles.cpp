#include "bbm/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bbm/euler_lagrange.hpp"
#include "bbm/io.hpp"
#include "bbm/parallel.hpp"

namespace bbm {

const char* to_string(ProfileKind kind) { return kind == ProfileKind::expected ? "expected" : "almost_sure"; }

namespace {

OptimalPathResult solve(const PotentialParams& params, ProfileKind kind, double z,
                        std::vector<double> grid = {}) {
    return kind == ProfileKind::expected ? solve_unconstrained(params, z, std::move(grid))
                                         : solve_constrained(params, z, std::move(grid));
}

}  // namespace

std::vector<double> default_profile_grid(const PotentialParams& params, ProfileKind kind, std::size_t points) {
    if (points < 2) throw DomainError("profile grid needs at least two points");
    double z_max = frontier_endpoint(params);
    if (kind == ProfileKind::expected && params.p > 0.0) z_max = 2.0 * optimal_endpoint(params, kind).z_hat;
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = z_max * static_cast<double>(i) / static_cast<double>(points - 1);
    grid.back() = z_max;
    return grid;
}

GrowthProfile tabulate_profile(const PotentialParams& params, ProfileKind kind, const std::vector<double>& z_grid) {
    for (std::size_t i = 1; i < z_grid.size(); ++i)
        if (!(z_grid[i] > z_grid[i - 1])) throw DomainError("profile grid must be strictly increasing");

    GrowthProfile profile;
    profile.kind = kind;
    profile.p = params.p;
    profile.m_beta = params.m_beta();
    profile.z_grid = z_grid;
    profile.K.assign(z_grid.size(), 0.0);
    profile.K_prime.assign(z_grid.size(), 0.0);

    std::vector<std::optional<std::string>> failures(z_grid.size());
    parallel_for(z_grid.size(), [&](std::size_t i) {
        try {
            const auto result = solve(params, kind, z_grid[i]);
            profile.K[i] = result.K_value;
            profile.K_prime[i] = -result.endpoint_deriv;
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (failures[i])
            throw std::runtime_error(std::string(to_string(kind)) + " profile failed at z = " +
                                     io::format_double(z_grid[i]) + ": " + *failures[i]);

    const auto endpoint = optimal_endpoint(params, kind);
    profile.z_hat = endpoint.z_hat;
    profile.K_hat = endpoint.K_hat;
    return profile;
}

OptimalEndpoint optimal_endpoint(const PotentialParams& params, ProfileKind kind) {
    auto slope = [&](double z) { return solve(params, kind, z).endpoint_deriv; };
    double lo = 0.0;
    double z_hat = 0.0;
    if (slope(lo) < 0.0) {
        double hi = frontier_endpoint(params);
        if (kind == ProfileKind::expected)
            while (slope(hi) < 0.0) hi *= 2.0;
        for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (slope(mid) < 0.0 ? lo : hi) = mid;
        }
        z_hat = 0.5 * (lo + hi);
    }
    OptimalEndpoint out;
    out.z_hat = z_hat;
    out.K_hat = solve(params, kind, z_hat).K_value;
    out.K_hat_identity = (2.0 - params.p) / (2.0 + params.p) * params.m_beta() * abs_pow(z_hat, params.p);
    return out;
}

double closed_form_z_hat(const PotentialParams& params, ProfileKind kind) {
    const double p = params.p;
    if (!(p > 0.0)) throw DomainError("closed-form z_hat needs p > 0");
    const double mb = params.m_beta();
    if (kind == ProfileKind::expected) {
        const double log_ratio =
            std::lgamma(0.5 + 1.0 / p) - 0.5 * std::log(std::numbers::pi) - std::lgamma(1.0 + 1.0 / p);
        return std::exp((std::log(2.0 * mb) + 2.0 * log_ratio) / (2.0 - p));
    }
    // int_{2^(-1/p)}^1 dx / sqrt(1 - x^p); the complement argument keeps
    // 1 - x^p accurate next to the singular endpoint.
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto integrand = [p](double x, double xc) {
        // Right of the midpoint xc = 1 - x; left of it xc = lower - x < 0.
        const double gap = xc > 0.0 ? -std::expm1(p * std::log1p(-xc)) : -std::expm1(p * std::log(x));
        return 1.0 / std::sqrt(gap);
    };
    const double lower = std::pow(2.0, -1.0 / p);
    double error = 0.0;
    const double J = integrator.integrate(integrand, lower, 1.0, 1e-12, &error);
    const double head = std::pow(2.0, (3.0 * p - 2.0) / (2.0 * p)) / (2.0 - p);
    return std::exp((0.5 * std::log(2.0 * mb) - std::log(head + J)) * 2.0 / (2.0 - p));
}

OdeCheck verify_profile_ode(const GrowthProfile& profile) {
    const double p = profile.p, mb = profile.m_beta;
    OdeCheck check;
    const std::size_t n = profile.z_grid.size();
    check.residual.assign(n, std::numeric_limits<double>::quiet_NaN());
    check.radicand.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = profile.z_grid[i];
        double rad = 2.0 * (2.0 + p) / (2.0 - p) * profile.K[i] + 4.0 * z * z / ((2.0 - p) * (2.0 - p)) -
                     2.0 * mb * abs_pow(z, p);
        check.radicand[i] = rad;
        if (rad < -1e-8) {
            check.negative.push_back(i);
            continue;
        }
        rad = std::max(rad, 0.0);
        const double r = std::abs(profile.K_prime[i] + 2.0 * z / (2.0 - p) - std::sqrt(rad));
        check.residual[i] = r;
        check.max_residual = std::max(check.max_residual, r);
    }
    return check;
}

FdCheck finite_difference_check(const GrowthProfile& profile, double z_min, double z_max) {
    FdCheck check;
    check.z_min = z_min;
    check.z_max = z_max;
    const auto& z = profile.z_grid;
    for (std::size_t i = 1; i + 1 < z.size(); ++i) {
        if (z[i] < z_min) continue;
        if (z[i] > z_max) break;
        const double h0 = z[i] - z[i - 1], h1 = z[i + 1] - z[i];
        const double fd = (h0 * h0 * profile.K[i + 1] - h1 * h1 * profile.K[i - 1] +
                           (h1 * h1 - h0 * h0) * profile.K[i]) /
                          (h0 * h1 * (h0 + h1));
        check.max_error = std::max(check.max_error, std::abs(fd - profile.K_prime[i]));
        ++check.points;
    }
    return check;
}

FdCheck finite_difference_check(const GrowthProfile& profile) {
    if (profile.z_grid.empty()) return {};
    const double end = profile.z_grid.back();
    return finite_difference_check(profile, 0.05 * end, 0.9 * end);
}

std::pair<double, double> expected_origin_identity(const PotentialParams& params) {
    const double lhs = solve_unconstrained(params, 0.0, {}).K_value;
    const double K_hat = optimal_endpoint(params, ProfileKind::expected).K_hat;
    const double p = params.p;
    return {lhs, std::pow(2.0, -2.0 * p / (2.0 - p)) * K_hat};
}

namespace {

double p2_z(double C, double phi) {
    return C * std::exp(std::atan(1.0 - 2.0 * phi)) / std::sqrt(2.0 * phi * phi - 2.0 * phi + 1.0);
}

double p2_L(double m_beta, double z, double phi) { return std::sqrt(2.0 * m_beta) * z * z * phi * phi; }

}  // namespace

double P2Solution::L_at_origin() const { return std::sqrt(2.0 * m_beta) * C * C * std::exp(-std::numbers::pi) / 2.0; }
double P2Solution::z_bar() const { return C * std::exp(std::numbers::pi / 4.0); }
double P2Solution::z_hat() const { return C * std::sqrt(2.0); }
double P2Solution::L_at_z_hat() const { return std::sqrt(2.0 * m_beta) * C * C / 2.0; }

P2Solution p2_parametric(double m_beta, double C, double phi_max, std::size_t points) {
    if (!(C > 0.0)) throw DomainError("p = 2 integration constant must be positive");
    if (!(m_beta > 0.0)) throw DomainError("m beta must be positive");
    if (!(phi_max > 0.5) || points < 3) throw DomainError("phi range must extend past 1/2");
    P2Solution sol;
    sol.C = C;
    sol.m_beta = m_beta;
    const double phi_min = 1e-6;
    sol.phi_grid.push_back(0.0);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        sol.phi_grid.push_back(phi_min * std::pow(phi_max / phi_min, t));
    }
    sol.phi_grid.back() = phi_max;
    sol.phi_grid.push_back(0.5);
    std::sort(sol.phi_grid.begin(), sol.phi_grid.end());
    sol.phi_grid.erase(std::unique(sol.phi_grid.begin(), sol.phi_grid.end()), sol.phi_grid.end());
    for (double phi : sol.phi_grid) {
        const double z = p2_z(C, phi);
        sol.z_of_phi.push_back(z);
        sol.L_of_phi.push_back(p2_L(m_beta, z, phi));
    }
    return sol;
}

double p2_ode_residual(const P2Solution& sol) {
    const double k = std::sqrt(2.0 * sol.m_beta);
    auto z = [&](double x) { return p2_z(sol.C, x); };
    auto L = [&](double x) { return p2_L(sol.m_beta, z(x), x); };
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < sol.phi_grid.size(); ++i) {
        const double phi = sol.phi_grid[i];
        const double d = 1e-4 * std::max(phi, 1.0);
        const double dz = (z(phi - 2 * d) - 8 * z(phi - d) + 8 * z(phi + d) - z(phi + 2 * d)) / (12 * d);
        const double dL = (L(phi - 2 * d) - 8 * L(phi - d) + 8 * L(phi + d) - L(phi + 2 * d)) / (12 * d);
        // L'(z) = dL / dz, multiplied through by dz/dphi, which vanishes at phi = 0.
        const double r = dL - (-k * sol.z_of_phi[i] + 2.0 * std::sqrt(k * sol.L_of_phi[i])) * dz;
        worst = std::max(worst, std::abs(r));
    }
    return worst / (k * sol.C * sol.C);
}

double p2_target_ratio() { return std::exp(std::numbers::pi / 4.0) / std::sqrt(2.0); }

std::vector<P2Ratio> p2_limit_check(const std::vector<double>& p_values) {
    std::vector<P2Ratio> out;
    for (double p : p_values) {
        if (!(p > 0.0 && p < 2.0)) throw DomainError("p2 limit needs p in (0, 2): p = " + io::format_double(p));
        const auto params = validate(make_params(2.0 / ((2.0 - p) * (2.0 - p)), p));
        const double z_hat = optimal_endpoint(params, ProfileKind::almost_sure).z_hat;
        out.push_back({p, frontier_endpoint(params) / z_hat});
    }
    return out;
}

std::string profile_to_csv(const GrowthProfile& profile, const std::string& comment) {
    io::CsvWriter csv{"z", "K", "K_prime"};
    if (!comment.empty()) csv.set_comment(comment);
    for (std::size_t i = 0; i < profile.z_grid.size(); ++i)
        csv.row({profile.z_grid[i], profile.K[i], profile.K_prime[i]});
    return csv.str();
}

}  // namespace bbm
