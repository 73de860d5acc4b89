#pragma once

#include <string>
#include <vector>

#include "bbm/model.hpp"
#include "bbm/rate.hpp"

namespace bbm {

/// Endpoint tolerance |f(1) - z| accepted from the boundary-value solvers.
inline constexpr double kBvpTolerance = 1e-8;

/// r(s) = (m beta s^2 (2-p)^2 / 2)^(1/(2-p)), the path with K(r, t) = 0.
double frontier(const PotentialParams& params, double s);

/// z_bar = r(1).
double frontier_endpoint(const PotentialParams& params);

SampledPath frontier_path(const PotentialParams& params, std::vector<double> grid = uniform_grid());

enum class PathKind { unconstrained, constrained };

enum class LegKind { line, frontier, arc_up, arc_down, rise };

/// One smooth piece of an optimal path, described in geometry units (see
/// PathGeometry). On arcs the height is x = peak * (1 - v^2). A rise is a
/// monotone arc far below its peak, parametrized by v = x / peak instead.
struct PathLeg {
    LegKind kind = LegKind::line;
    double s_begin = 0.0;
    double s_end = 1.0;
    double v_begin = 0.0;
    double v_end = 0.0;
    // Points (s, v) already located on the arc; evaluation restarts from the
    // nearest one.
    std::vector<double> node_s;
    std::vector<double> node_v;
};

/// Exact description of an optimal path. For p > 0 lengths are measured in
/// units of z_bar, where the potential coefficient becomes a = 2 / (2-p)^2 and
/// the frontier is s^q. For p = 0 the units are physical and a = m beta.
struct PathGeometry {
    double scale = 1.0;       // physical length of one geometry unit
    double p = 0.0;
    double a = 0.0;           // potential coefficient in geometry units
    double q = 1.0;
    double slope = 0.0;       // p = 0 only
    double peak = 0.0;        // arc peak height M
    double time_scale = 0.0;  // M^(1 - p/2) / sqrt(2a)
    std::vector<PathLeg> legs;
};

struct OptimalPathResult {
    PathKind kind = PathKind::unconstrained;
    double z = 0.0;
    SampledPath path;
    double s_switch = 0.0;        // end of the frontier phase
    double energy_c = 0.0;        // f'^2/2 + m beta |f|^p on the arc
    double K_value = 0.0;         // K(f, 1) from quadrature along the arc
    double endpoint_deriv = 0.0;  // f'(1)
    PathGeometry geometry;
};

/// h_z: maximizer of K(f, 1) over paths from 0 to z. Requires z >= 0.
/// An empty grid skips sampling; the scalar fields are still filled.
OptimalPathResult solve_unconstrained(const PotentialParams& params, double z,
                                      std::vector<double> grid = uniform_grid());

/// g_z: maximizer of K(f, 1) over paths from 0 to z that never go extinct.
/// Requires 0 <= z <= z_bar.
OptimalPathResult solve_constrained(const PotentialParams& params, double z,
                                    std::vector<double> grid = uniform_grid());

/// Value of the optimal path at any s in [0, 1], without grid interpolation.
double evaluate_path(const OptimalPathResult& result, double s);

/// Numerical self-checks of a solved path, all in geometry units.
struct PathDiagnostics {
    double endpoint_error = 0.0;   // |f(1) - z| in physical units
    double energy_residual = 0.0;  // max |f'^2/2 + a f^p - c| on the arc
    double energy_tolerance = 0.0;
    double c1_gap = 0.0;           // |f'(s_z-) - f'(s_z+)|
    double el_residual = 0.0;      // max |f'' + a p f^(p-1)| on arc grid points
    double el_tolerance = 0.0;
    double frontier_excess = 0.0;  // max(f - r) over the grid
    double min_K = 0.0;            // min over the grid of K(f, t)

    bool ok(PathKind kind) const;
};

PathDiagnostics diagnose(const OptimalPathResult& result);

/// "s,f" CSV of the sampled path.
std::string result_to_csv(const OptimalPathResult& result, const std::string& comment = {});

/// JSON object with z, s_switch, energy_c, K_value, endpoint_deriv and kind.
std::string result_to_json(const OptimalPathResult& result);

const char* to_string(PathKind kind);

}  // namespace bbm
