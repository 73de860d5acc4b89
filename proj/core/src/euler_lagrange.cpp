#include "bbm/euler_lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "bbm/io.hpp"
#include "bbm/quadrature.hpp"

namespace bbm {

double frontier(const PotentialParams& params, double s) {
    const double p = params.p;
    return std::pow(params.m_beta() * s * s * (2.0 - p) * (2.0 - p) / 2.0, 1.0 / (2.0 - p));
}

double frontier_endpoint(const PotentialParams& params) { return frontier(params, 1.0); }

SampledPath frontier_path(const PotentialParams& params, std::vector<double> grid) {
    return sample_path([&](double s) { return frontier(params, s); }, std::move(grid));
}

const char* to_string(PathKind kind) {
    return kind == PathKind::unconstrained ? "unconstrained" : "constrained";
}

namespace {

// Arc integrand after x = M (1 - v^2): dx / sqrt(1 - (x/M)^p) = psi(v) dv.
double psi(double v, double p) {
    if (v < 1e-7) return 2.0 / std::sqrt(p);
    if (v >= 1.0) return 2.0;
    const double gap = -std::expm1(p * std::log1p(-v * v));
    return 2.0 * v / std::sqrt(gap);
}

// 1 - (1 - v^2)^p without cancellation.
double height_gap(double v, double p) {
    if (v >= 1.0) return 1.0;
    return -std::expm1(p * std::log1p(-v * v));
}

double Psi(double p, double v0, double v1) {
    return quad::integrate([p](double v) { return psi(v, p); }, v0, v1, 1e-15, 1e-14).value;
}

// int (2 (1 - v^2)^p - 1) psi(v) dv, the K density along an arc.
double K_integral(double p, double v0, double v1) {
    auto density = [p](double v) {
        const double level = v >= 1.0 ? 0.0 : std::exp(p * std::log1p(-v * v));
        return (2.0 * level - 1.0) * psi(v, p);
    };
    return quad::integrate(density, v0, v1, 1e-15, 1e-14).value;
}

// Rise coordinate y = x / M: dx / sqrt(1 - (x/M)^p) = M dy / sqrt(1 - y^p).
// Only used for y <= 1/2, where the integrand is bounded.
double rise_density(double y, double p) { return 1.0 / std::sqrt(-std::expm1(p * std::log(y))); }

double Rise(double p, double y0, double y1) {
    return quad::integrate([p](double y) { return y <= 0.0 ? 1.0 : rise_density(y, p); }, y0, y1, 1e-300, 1e-14)
        .value;
}

double rise_K_integral(double p, double y0, double y1) {
    auto density = [p](double y) {
        if (y <= 0.0) return -1.0;
        const double level = std::exp(p * std::log(y));
        return (2.0 * level - 1.0) / std::sqrt(1.0 - level);
    };
    return quad::integrate(density, y0, y1, 1e-300, 1e-14).value;
}

double time_scale(double M, double p, double a) { return std::pow(M, 1.0 - 0.5 * p) / std::sqrt(2.0 * a); }

double arc_K(double M, double p, double a, double v0, double v1) {
    return std::sqrt(0.5 * a) * std::pow(M, 1.0 + 0.5 * p) * K_integral(p, v0, v1);
}

// Root of a monotone f on [lo, hi] with f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(const F& f, double lo, double hi) {
    const double f_lo = f(lo);
    if (f_lo == 0.0) return lo;
    const bool rising = f_lo < 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((f(mid) < 0.0) == rising)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Geometry in units of length `scale`, where the potential coefficient is
// m beta scale^(p-2) = a.
PathGeometry unit_geometry(const PotentialParams& params, double a) {
    PathGeometry g;
    g.p = params.p;
    g.a = a;
    g.q = params.q();
    g.scale = std::pow(params.m_beta() / a, 1.0 / (2.0 - params.p));
    if (!(g.scale > std::numeric_limits<double>::min()) || !std::isfinite(g.scale))
        throw DomainError("length scale of the problem is not representable in double precision; "
                          "rescale beta");
    return g;
}

double leg_direction(const PathLeg& leg) { return leg.kind == LegKind::arc_up ? -1.0 : 1.0; }

// Locates v on an arc leg with elapsed time s, starting from the known point
// (s0, v0). Safeguarded Newton on the progress coordinate w = dir * v.
double invert_arc(const PathGeometry& g, const PathLeg& leg, double s0, double v0, double s) {
    const double dir = leg_direction(leg);
    const double ts = g.time_scale;
    double w_lo = dir * v0;
    double w_hi = dir * leg.v_end;
    if (w_hi < w_lo) std::swap(w_lo, w_hi);
    auto residual = [&](double w) { return s0 + ts * dir * Psi(g.p, v0, dir * w) - s; };

    if (residual(w_hi) <= 0.0) return dir * w_hi;
    double w = dir * v0 + (s - s0) / (ts * psi(v0, g.p));
    w = std::clamp(w, w_lo, w_hi);
    for (int it = 0; it < 100; ++it) {
        const double r = residual(w);
        if (std::abs(r) <= 1e-15) break;
        if (r < 0.0)
            w_lo = w;
        else
            w_hi = w;
        if (w_hi - w_lo <= 1e-16) break;
        double next = w - r / (ts * psi(dir * w, g.p));
        if (!(next > w_lo && next < w_hi)) next = 0.5 * (w_lo + w_hi);
        w = next;
    }
    return dir * w;
}

// Locates y on a rise leg with elapsed time s from the known point (s0, y0).
double invert_rise(const PathGeometry& g, const PathLeg& leg, double s0, double y0, double s) {
    const double ts = g.time_scale;
    double lo = y0, hi = leg.v_end;
    auto residual = [&](double y) { return s0 + ts * Rise(g.p, y0, y) - s; };
    if (residual(hi) <= 0.0) return hi;
    double y = std::clamp(y0 + (s - s0) / ts, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double r = residual(y);
        if (std::abs(r) <= 1e-15) break;
        (r < 0.0 ? lo : hi) = y;
        if (hi - lo <= 1e-16 * hi) break;
        double next = y - r / (ts * (y > 0.0 ? rise_density(y, g.p) : 1.0));
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        y = next;
    }
    return y;
}

double leg_value(const PathGeometry& g, const PathLeg& leg, double v) {
    if (leg.kind == LegKind::rise) return g.peak * v;
    return g.peak * (1.0 - v) * (1.0 + v);
}

double invert_leg(const PathGeometry& g, const PathLeg& leg, double s0, double v0, double s) {
    return leg.kind == LegKind::rise ? invert_rise(g, leg, s0, v0, s) : invert_arc(g, leg, s0, v0, s);
}

// Fills node tables and returns unit-scale values on the grid.
std::vector<double> sample_geometry(PathGeometry& g, const std::vector<double>& grid) {
    std::vector<double> values(grid.size(), 0.0);
    std::size_t j = 0;
    double s_prev = 0.0, v_prev = 0.0;
    bool fresh = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = grid[i];
        while (j + 1 < g.legs.size() && s > g.legs[j].s_end) {
            ++j;
            fresh = true;
        }
        PathLeg& leg = g.legs[j];
        if (fresh) {
            s_prev = leg.s_begin;
            v_prev = leg.v_begin;
            leg.node_s.assign(1, s_prev);
            leg.node_v.assign(1, v_prev);
            fresh = false;
        }
        switch (leg.kind) {
            case LegKind::line:
                values[i] = g.slope * s;
                break;
            case LegKind::frontier:
                values[i] = std::pow(s, g.q);
                break;
            case LegKind::arc_up:
            case LegKind::arc_down:
            case LegKind::rise: {
                const double v = invert_leg(g, leg, s_prev, v_prev, std::max(s, s_prev));
                if (s > s_prev) {
                    s_prev = s;
                    v_prev = v;
                    leg.node_s.push_back(s);
                    leg.node_v.push_back(v);
                }
                values[i] = leg_value(g, leg, v);
                break;
            }
        }
    }
    return values;
}

double geometry_value(const PathGeometry& g, double s) {
    s = std::clamp(s, 0.0, 1.0);
    std::size_t j = 0;
    while (j + 1 < g.legs.size() && s > g.legs[j].s_end) ++j;
    const PathLeg& leg = g.legs[j];
    switch (leg.kind) {
        case LegKind::line:
            return g.slope * s;
        case LegKind::frontier:
            return std::pow(s, g.q);
        default:
            break;
    }
    double s0 = leg.s_begin, v0 = leg.v_begin;
    if (!leg.node_s.empty()) {
        auto it = std::upper_bound(leg.node_s.begin(), leg.node_s.end(), s);
        if (it != leg.node_s.begin()) {
            const auto k = static_cast<std::size_t>(it - leg.node_s.begin()) - 1;
            s0 = leg.node_s[k];
            v0 = leg.node_v[k];
        }
    }
    if (s <= s0) return leg_value(g, leg, v0);
    return leg_value(g, leg, invert_leg(g, leg, s0, v0, s));
}

PathLeg make_leg(LegKind kind, double s_begin, double s_end, double v_begin, double v_end) {
    PathLeg leg;
    leg.kind = kind;
    leg.s_begin = s_begin;
    leg.s_end = s_end;
    leg.v_begin = v_begin;
    leg.v_end = v_end;
    return leg;
}

// Samples the geometry on the grid. The last sample is pinned to the exact
// end height after checking that the sampled one agrees with it.
void finish(OptimalPathResult& result, const std::vector<double>& grid) {
    PathGeometry& g = result.geometry;
    if (!g.legs.empty()) g.legs.back().s_end = 1.0;
    if (grid.empty()) return;
    auto unit = sample_geometry(g, grid);
    for (double& x : unit) x *= g.scale;
    unit.front() = 0.0;
    result.path = SampledPath{grid, std::move(unit)};
    check_path(result.path);
    if (std::abs(result.path.values.back() - result.z) > kBvpTolerance * std::max(1.0, g.scale))
        throw std::runtime_error("boundary value solve missed endpoint z = " + io::format_double(result.z));
    result.path.values.back() = result.z;
}

OptimalPathResult straight_line(const PotentialParams& params, double z, PathKind kind,
                                std::vector<double> grid) {
    OptimalPathResult result;
    result.kind = kind;
    result.z = z;
    result.s_switch = 0.0;
    result.energy_c = 0.5 * z * z + params.m_beta();
    result.K_value = params.m_beta() - 0.5 * z * z;
    result.endpoint_deriv = z;
    PathGeometry& g = result.geometry;
    g.p = 0.0;
    g.a = params.m_beta();
    g.slope = z;
    g.legs.push_back(make_leg(LegKind::line, 0.0, 1.0, 0.0, 0.0));
    finish(result, grid);
    return result;
}

void require_nonnegative(double z) {
    if (!(z >= 0.0) || !std::isfinite(z))
        throw DomainError("endpoint must be finite and >= 0 (use the odd symmetry for z < 0): z = " +
                          io::format_double(z));
}

}  // namespace

OptimalPathResult solve_unconstrained(const PotentialParams& params, double z, std::vector<double> grid) {
    require_nonnegative(z);
    if (params.p == 0.0) return straight_line(params, z, PathKind::unconstrained, std::move(grid));

    OptimalPathResult result;
    result.kind = PathKind::unconstrained;
    result.z = z;
    // Units of the zero-terminal-slope peak, so that this peak is 1.
    const double Ip = Psi(params.p, 0.0, 1.0);
    PathGeometry g = unit_geometry(params, 0.5 * Ip * Ip);
    const double p = g.p, a = g.a;
    const double zu = z / g.scale;

    // The terminal arc coordinate w = cos(theta) fixes the peak
    // M = z / sin(theta)^2. w < 0: monotone path that stops short of M;
    // w >= 0: rises to M and descends. f'(1) is proportional to -w, so theta
    // resolves the endpoint slope where it vanishes and the peak when z << M.
    double w = 1.0;
    double M = std::pow(std::sqrt(2.0 * a) / (2.0 * Ip), 2.0 / (2.0 - p));
    double y_end = 0.0;  // > 0 selects the rise parametrization
    if (zu > 0.0) {
        auto F = [&](double theta) {
            const double x = std::cos(theta), gap = std::sin(theta);
            if (gap <= 0.0) return x > 0.0 ? 1.0 : -1.0;
            const double flight = x >= 0.0 ? Ip + Psi(p, 0.0, x) : Psi(p, -x, 1.0);
            return time_scale(zu / (gap * gap), p, a) * flight - 1.0;
        };
        const double half = 0.5 * std::numbers::pi;
        if (F(half) >= 0.0) {
            // Monotone path. Solve for y = z / M on a log scale: for small p
            // the peak can exceed z by many orders of magnitude.
            auto log_residual = [&](double log_y) {
                const double y = std::exp(log_y);
                const double flight = y <= 0.5 ? Rise(p, 0.0, y) : Psi(p, std::sqrt(1.0 - y), 1.0);
                return (1.0 - 0.5 * p) * (std::log(zu) - log_y) - 0.5 * std::log(2.0 * a) + std::log(flight);
            };
            const double y = std::exp(bisect(log_residual, -700.0, 0.0));
            M = zu / y;
            if (!std::isfinite(M) || log_residual(std::log(y)) > 1e-6)
                throw DomainError("peak of the optimal path is not representable in double precision; "
                                  "endpoint too large: z = " + io::format_double(z));
            y_end = y <= 0.5 ? y : 0.0;
            w = -std::sqrt(1.0 - y);
        } else {
            const double theta = bisect(F, 0.0, half);
            w = std::cos(theta);
            M = zu / (std::sin(theta) * std::sin(theta));
        }
    }
    const double u = std::abs(w);
    const double sign = w > 0.0 ? -1.0 : 1.0;
    g.peak = M;
    g.time_scale = time_scale(M, p, a);
    double K = 0.0;
    double gap = height_gap(u, p);
    if (y_end > 0.0) {
        g.legs.push_back(make_leg(LegKind::rise, 0.0, 1.0, 0.0, y_end));
        const double I = rise_K_integral(p, 0.0, y_end);
        if (I != 0.0)
            K = std::copysign(std::exp(0.5 * std::log(0.5 * a) + (1.0 + 0.5 * p) * std::log(M) + std::log(std::abs(I))), I);
        gap = -std::expm1(p * std::log(y_end));
    } else if (w <= 0.0) {
        g.legs.push_back(make_leg(LegKind::arc_up, 0.0, 1.0, 1.0, u));
        K = arc_K(M, p, a, u, 1.0);
    } else {
        const double s_peak = g.time_scale * Ip;
        g.legs.push_back(make_leg(LegKind::arc_up, 0.0, s_peak, 1.0, 0.0));
        g.legs.push_back(make_leg(LegKind::arc_down, s_peak, 1.0, 0.0, u));
        K = arc_K(M, p, a, 0.0, 1.0) + arc_K(M, p, a, 0.0, u);
    }

    const double L = g.scale;
    const double c_unit = a * std::pow(M, p);
    result.energy_c = c_unit * L * L;
    result.K_value = K * L * L;
    result.endpoint_deriv = sign * std::sqrt(2.0 * c_unit * gap) * L;
    result.s_switch = 0.0;
    result.geometry = std::move(g);
    finish(result, grid);
    return result;
}

OptimalPathResult solve_constrained(const PotentialParams& params, double z, std::vector<double> grid) {
    require_nonnegative(z);
    if (params.p == 0.0) {
        const double z_bar = frontier_endpoint(params);
        if (z > z_bar + kBvpTolerance)
            throw DomainError("endpoint beyond the frontier: z = " + io::format_double(z) +
                              " > z_bar = " + io::format_double(z_bar));
        return straight_line(params, z, PathKind::constrained, std::move(grid));
    }

    OptimalPathResult result;
    result.kind = PathKind::constrained;
    result.z = z;
    // Units of z_bar, so that the frontier is s^q.
    PathGeometry g = unit_geometry(params, 2.0 / ((2.0 - params.p) * (2.0 - params.p)));
    const double p = g.p, a = g.a, q = g.q, L = g.scale;
    const double zu = z / L;
    if (zu > 1.0 + kBvpTolerance)
        throw DomainError("endpoint beyond the frontier: z = " + io::format_double(z) +
                          " > z_bar = " + io::format_double(L));

    if (zu >= 1.0 - 1e-12) {
        result.z = std::min(z, L);
        result.s_switch = 1.0;
        result.energy_c = 2.0 * a * L * L;
        result.K_value = 0.0;
        result.endpoint_deriv = q * L;
        g.legs.push_back(make_leg(LegKind::frontier, 0.0, 1.0, 0.0, 0.0));
        result.geometry = std::move(g);
        finish(result, grid);
        result.z = z;
        if (!result.path.values.empty()) result.path.values.back() = z;
        return result;
    }

    const double two_p = std::pow(2.0, 1.0 / p);
    const double lambda = std::pow(2.0, (2.0 - p) / (2.0 * p)) / std::sqrt(2.0 * a);
    auto sigma_of = [&](double M) { return std::pow(M / two_p, 1.0 / q); };

    // The arc leaves the frontier at y = x / M = 2^(-1/p), which is tiny for
    // small p, so it is followed in y up to y_split and in v above it.
    const double y_star = std::exp(-std::log(2.0) / p);
    const double u_star = std::sqrt(-std::expm1(-std::log(2.0) / p));
    const double y_split = std::max(y_star, 0.5);
    const double v_split = y_star >= 0.5 ? u_star : std::sqrt(0.5);
    const double rise_part = y_star < 0.5 ? Rise(p, y_star, 0.5) : 0.0;
    auto up_flight = [&](double y) {
        if (y <= y_split) return Rise(p, y_star, y);
        return rise_part + Psi(p, std::sqrt(1.0 - y), v_split);
    };
    const double Iu = rise_part + Psi(p, 0.0, v_split);

    // Peaked paths use the terminal coordinate w = cos(theta) of the
    // unconstrained solve; monotone ones are solved for y = z / M.
    double w = 1.0;
    double y_end = 1.0;
    double M = two_p * std::pow(1.0 / (1.0 + lambda * (Iu + Psi(p, 0.0, 1.0))), q);
    if (zu > 0.0) {
        auto F = [&](double theta) {
            const double gap = std::sin(theta);
            if (gap <= 0.0) return 1.0;
            return sigma_of(zu / (gap * gap)) * (1.0 + lambda * (Iu + Psi(p, 0.0, std::cos(theta)))) - 1.0;
        };
        const double half = 0.5 * std::numbers::pi;
        if (F(half) > 0.0) {
            auto G = [&](double log_y) {
                const double y = std::exp(log_y);
                return sigma_of(zu / y) * (1.0 + lambda * up_flight(y)) - 1.0;
            };
            y_end = std::exp(bisect(G, std::log(y_star), 0.0));
            M = zu / y_end;
            w = -std::sqrt(1.0 - y_end);
        } else {
            const double theta = bisect(F, 0.0, half);
            w = std::cos(theta);
            M = zu / (std::sin(theta) * std::sin(theta));
        }
    }
    const double u = std::abs(w);
    const double sign = w > 0.0 ? -1.0 : 1.0;
    const double sigma = sigma_of(M);
    g.peak = M;
    g.time_scale = time_scale(M, p, a);
    const double ts = g.time_scale;
    auto rise_K = [&](double y0, double y1) {
        return std::sqrt(0.5 * a) * std::pow(M, 1.0 + 0.5 * p) * rise_K_integral(p, y0, y1);
    };
    g.legs.push_back(make_leg(LegKind::frontier, 0.0, sigma, 0.0, 0.0));
    double K = 0.0;
    double s_at = sigma;
    const bool monotone = w <= 0.0;
    if (y_star < 0.5) {
        const double y_top = monotone ? std::min(y_end, 0.5) : 0.5;
        const double s_top = y_top == 0.5 ? sigma + ts * rise_part : 1.0;
        g.legs.push_back(make_leg(LegKind::rise, s_at, s_top, y_star, y_top));
        K += rise_K(y_star, y_top);
        s_at = s_top;
    }
    if (monotone) {
        if (y_end > y_split) {
            g.legs.push_back(make_leg(LegKind::arc_up, s_at, 1.0, v_split, u));
            K += arc_K(M, p, a, u, v_split);
        }
    } else {
        const double s_peak = sigma + ts * Iu;
        g.legs.push_back(make_leg(LegKind::arc_up, s_at, s_peak, v_split, 0.0));
        g.legs.push_back(make_leg(LegKind::arc_down, s_peak, 1.0, 0.0, u));
        K += arc_K(M, p, a, 0.0, v_split) + arc_K(M, p, a, 0.0, u);
    }
    const double end_gap = monotone ? -std::expm1(p * std::log(y_end)) : height_gap(u, p);

    const double c_unit = a * std::pow(g.peak, p);
    result.s_switch = sigma;
    result.energy_c = c_unit * L * L;
    result.K_value = K * L * L;
    result.endpoint_deriv = sign * std::sqrt(2.0 * c_unit * end_gap) * L;
    result.geometry = std::move(g);
    finish(result, grid);
    return result;
}

double evaluate_path(const OptimalPathResult& result, double s) {
    return result.geometry.scale * geometry_value(result.geometry, s);
}

bool PathDiagnostics::ok(PathKind kind) const {
    const bool base = endpoint_error <= kBvpTolerance && energy_residual <= energy_tolerance &&
                      el_residual <= el_tolerance;
    if (kind == PathKind::unconstrained) return base;
    return base && c1_gap <= 1e-6 && frontier_excess <= 1e-9 && min_K >= -kExtinctionTolerance;
}

PathDiagnostics diagnose(const OptimalPathResult& result) {
    if (result.path.size() < 3) throw DomainError("diagnose needs a sampled path");
    const PathGeometry& g = result.geometry;
    const auto& grid = result.path.grid;
    const std::size_t n = grid.size();
    auto f = [&](double s) { return geometry_value(g, s); };
    std::vector<double> unit(n);
    for (std::size_t i = 0; i < n; ++i) unit[i] = result.path.values[i] / g.scale;

    PathDiagnostics d;
    d.endpoint_error = std::abs(result.path.values.back() - result.z) / std::max(1.0, g.scale);

    // Arc interior: derivatives by 5-point stencils of the exact evaluator,
    // with the step shrunk near the arc ends where f'' may be singular.
    const double c = result.energy_c / (g.scale * g.scale);
    const double arc_begin = result.kind == PathKind::constrained ? result.s_switch : 0.0;
    d.energy_tolerance = 1e-6 * (1.0 + std::abs(c));
    double max_force = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double s = grid[i];
        if (s <= arc_begin) continue;
        const double h = std::min(1e-4, std::min(s - arc_begin, 1.0 - s) / 32.0);
        // A grid stencil here would straddle the switch point.
        const bool at_switch = arc_begin > 0.0 && s - arc_begin < s - grid[i - 1];
        const double fm2 = f(s - 2 * h), fm1 = f(s - h), f0 = f(s), fp1 = f(s + h), fp2 = f(s + 2 * h);
        const double slope = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        const double e = 0.5 * slope * slope + g.a * abs_pow(f0, g.p) - c;
        d.energy_residual = std::max(d.energy_residual, std::abs(e));
        if (g.p == 0.0 || f0 <= 0.0 || at_switch) continue;
        const double second = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
        const double force = g.a * g.p * std::pow(f0, g.p - 1.0);
        max_force = std::max(max_force, force);
        d.el_residual = std::max(d.el_residual, std::abs(second + force));
    }
    d.el_tolerance = 1e-4 * max_force;

    if (result.kind == PathKind::constrained && result.s_switch > 0.0 && result.s_switch < 1.0) {
        const double sz = result.s_switch;
        // The frontier curvature grows like s^(q-2) near 0, so the step
        // follows the distance to the nearer end of [0, 1].
        const double h = std::min(1e-5, 1e-3 * std::min(sz, 1.0 - sz));
        const double f0 = f(sz);
        const double left = (3.0 * f0 - 4.0 * f(sz - h) + f(sz - 2 * h)) / (2.0 * h);
        const double right = (-3.0 * f0 + 4.0 * f(sz + h) - f(sz + 2 * h)) / (2.0 * h);
        d.c1_gap = std::abs(left - right);
    }

    d.frontier_excess = -std::numeric_limits<double>::infinity();
    const double two_minus_p = 2.0 - g.p;
    for (std::size_t i = 0; i < n; ++i) {
        const double r =
            std::pow(g.a * two_minus_p * two_minus_p * grid[i] * grid[i] / 2.0, 1.0 / two_minus_p);
        d.frontier_excess = std::max(d.frontier_excess, unit[i] - r);
    }
    PotentialParams unit_params;
    unit_params.p = g.p;
    unit_params.beta = g.a;
    const auto curve = rate_functional(unit_params, SampledPath{grid, unit});
    d.min_K = *std::min_element(curve.K_values.begin(), curve.K_values.end());
    return d;
}

std::string result_to_csv(const OptimalPathResult& result, const std::string& comment) {
    io::CsvWriter csv{"s", "f"};
    if (!comment.empty()) csv.set_comment(comment);
    for (std::size_t i = 0; i < result.path.size(); ++i) csv.row({result.path.grid[i], result.path.values[i]});
    return csv.str();
}

std::string result_to_json(const OptimalPathResult& result) {
    nlohmann::json j;
    j["kind"] = to_string(result.kind);
    j["z"] = result.z;
    j["s_switch"] = result.s_switch;
    j["energy_c"] = result.energy_c;
    j["K_value"] = result.K_value;
    j["endpoint_deriv"] = result.endpoint_deriv;
    return j.dump(2) + "\n";
}

}  // namespace bbm
