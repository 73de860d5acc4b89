#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bbm/model.hpp"

namespace bbm {

enum class ProfileKind { expected, almost_sure };

const char* to_string(ProfileKind kind);

/// z -> K(z) tabulated from optimal paths, with K'(z) = -f_z'(1).
struct GrowthProfile {
    ProfileKind kind = ProfileKind::expected;
    double p = 1.0;
    double m_beta = 1.0;
    std::vector<double> z_grid;
    std::vector<double> K;
    std::vector<double> K_prime;
    double z_hat = 0.0;
    double K_hat = 0.0;
};

/// n uniform points on [0, 2 z_hat_exp] (expected) or [0, z_bar] (almost sure).
/// For p = 0 the expected range is [0, z_bar] as z_hat_exp = 0.
std::vector<double> default_profile_grid(const PotentialParams& params, ProfileKind kind,
                                         std::size_t points = 101);

/// Solves one optimal path per grid point (in parallel) and records K and K'.
/// Failures are rethrown with the offending z in the message.
GrowthProfile tabulate_profile(const PotentialParams& params, ProfileKind kind,
                               const std::vector<double>& z_grid);

struct OptimalEndpoint {
    double z_hat = 0.0;
    double K_hat = 0.0;
    /// ((2-p)/(2+p)) m beta z_hat^p, which should equal K_hat.
    double K_hat_identity = 0.0;
};

/// Root of the terminal slope f_z'(1) in z, by bisection.
OptimalEndpoint optimal_endpoint(const PotentialParams& params, ProfileKind kind);

/// z_hat from the Gamma-function formula (expected) or the integral formula
/// (almost sure). Requires p > 0.
double closed_form_z_hat(const PotentialParams& params, ProfileKind kind);

struct OdeCheck {
    double max_residual = 0.0;
    std::vector<double> residual;        // NaN where the radicand was rejected
    std::vector<double> radicand;
    std::vector<std::size_t> negative;   // indices with radicand < -1e-8
};

/// Residual of K' = -2z/(2-p) + sqrt(2(2+p)/(2-p) K + 4z^2/(2-p)^2 - 2 m beta z^p)
/// at every grid point, using the stored K'.
OdeCheck verify_profile_ode(const GrowthProfile& profile);

struct FdCheck {
    double max_error = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    std::size_t points = 0;
};

/// Centered differences of K against the stored K' at interior grid points
/// in [z_min, z_max]. K'' is unbounded at z = 0 for p < 1 and at z_bar for the
/// almost-sure profile, so the window should stay clear of those ends.
FdCheck finite_difference_check(const GrowthProfile& profile, double z_min, double z_max);

/// finite_difference_check on [0.05, 0.9] x (last grid point).
FdCheck finite_difference_check(const GrowthProfile& profile);

/// (K_exp(0), 2^(-2p/(2-p)) K_hat_exp).
std::pair<double, double> expected_origin_identity(const PotentialParams& params);

/// Implicit solution of the growth-profile equation in the critical case p = 2.
struct P2Solution {
    double C = 1.0;
    double m_beta = 1.0;
    std::vector<double> phi_grid;
    std::vector<double> z_of_phi;
    std::vector<double> L_of_phi;

    double L_at_origin() const;  // limit phi -> infinity
    double z_bar() const;        // phi = 0
    double z_hat() const;        // phi = 1/2
    double L_at_z_hat() const;
};

P2Solution p2_parametric(double m_beta, double C, double phi_max = 50.0, std::size_t points = 2001);

/// max over interior table points of the residual of
/// L'(z) = -sqrt(2 m beta) z + 2 sqrt(sqrt(2 m beta) L), multiplied by dz/dphi
/// and divided by sqrt(2 m beta) C^2. Derivatives in phi are numerical.
double p2_ode_residual(const P2Solution& solution);

/// e^(pi/4) / sqrt(2).
double p2_target_ratio();

struct P2Ratio {
    double p = 0.0;
    double ratio = 0.0;  // z_bar / z_hat_as
};

/// z_bar / z_hat_as for each p in (0, 2). The ratio does not depend on
/// m beta, so each solve runs at the m beta for which z_bar = 1.
std::vector<P2Ratio> p2_limit_check(const std::vector<double>& p_values);

/// "z,K,K_prime" CSV.
std::string profile_to_csv(const GrowthProfile& profile, const std::string& comment = {});

}  // namespace bbm
