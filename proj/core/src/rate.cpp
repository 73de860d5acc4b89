#include "bbm/rate.hpp"

#include <algorithm>
#include <cmath>

#include "bbm/io.hpp"

namespace bbm {

std::vector<double> uniform_grid(std::size_t intervals) {
    if (intervals == 0) throw DomainError("grid needs at least one interval");
    std::vector<double> grid(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        grid[i] = static_cast<double>(i) / static_cast<double>(intervals);
    return grid;
}

namespace {

std::size_t interval_index(const std::vector<double>& grid, double s) {
    if (s <= grid.front()) return 0;
    if (s >= grid.back()) return grid.size() - 2;
    const auto it = std::upper_bound(grid.begin(), grid.end(), s);
    return static_cast<std::size_t>(it - grid.begin()) - 1;
}

}  // namespace

double SampledPath::at(double s) const {
    const std::size_t i = interval_index(grid, s);
    const double s0 = grid[i], s1 = grid[i + 1];
    const double w = (std::clamp(s, s0, s1) - s0) / (s1 - s0);
    return values[i] + w * (values[i + 1] - values[i]);
}

double SampledPath::slope_at(double s) const {
    const std::size_t i = interval_index(grid, s);
    return (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
}

void check_path(const SampledPath& path) {
    if (path.grid.size() < 2) throw DomainError("path needs at least two samples");
    if (path.grid.size() != path.values.size()) throw DomainError("grid/values length mismatch");
    if (path.grid.front() != 0.0 || path.grid.back() != 1.0)
        throw DomainError("path grid must span [0,1]");
    for (std::size_t i = 1; i < path.grid.size(); ++i)
        if (!(path.grid[i] > path.grid[i - 1])) throw DomainError("path grid not strictly increasing");
    for (double v : path.values)
        if (!std::isfinite(v)) throw DomainError("path has non-finite values");
    if (path.values.front() != 0.0) throw DomainError("path must start at the origin");
}

double linear_abs_pow_integral(double y0, double y1, double h, double p) {
    if (p == 0.0) return h;
    const double a = std::abs(y0), b = std::abs(y1);
    if (y0 * y1 < 0.0) {
        // Passes through zero: split at the root, each side is |linear|^p from 0.
        return h * (a * std::pow(a, p) + b * std::pow(b, p)) / ((a + b) * (p + 1.0));
    }
    const double hi = std::max(a, b);
    if (hi == 0.0) return 0.0;
    if (std::abs(b - a) <= 1e-3 * hi) {
        // Nearly constant and bounded away from zero: 3-point Gauss-Legendre.
        constexpr double kNode = 0.7745966692414834;  // sqrt(3/5)
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        return h * (5.0 * std::pow(mid - kNode * half, p) + 8.0 * std::pow(mid, p) +
                    5.0 * std::pow(mid + kNode * half, p)) /
               18.0;
    }
    return h * (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / ((p + 1.0) * (b - a));
}

RateCurve rate_functional(const PotentialParams& params, const SampledPath& f) {
    check_path(f);
    const double mb = params.m_beta();
    RateCurve curve;
    curve.grid = f.grid;
    curve.K_values.assign(f.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        const double h = f.grid[i] - f.grid[i - 1];
        const double dy = f.values[i] - f.values[i - 1];
        const double potential = mb * linear_abs_pow_integral(f.values[i - 1], f.values[i], h, params.p);
        const double kinetic = 0.5 * dy * dy / h;
        acc += potential - kinetic;
        curve.K_values[i] = acc;
    }
    return curve;
}

double extinction_time(const RateCurve& curve, double tol) {
    for (std::size_t i = 1; i < curve.K_values.size(); ++i)
        if (curve.K_values[i] < -tol) return curve.grid[i - 1];
    return kNeverExtinct;
}

double presence_rate(const RateCurve& curve, double t, double tol) {
    double lowest = 0.0;
    for (std::size_t i = 0; i < curve.grid.size() && curve.grid[i] <= t; ++i)
        lowest = std::min(lowest, curve.K_values[i]);
    return lowest < -tol ? lowest : 0.0;
}

std::string path_to_csv(const SampledPath& path) {
    io::CsvWriter csv{"t", "f"};
    for (std::size_t i = 0; i < path.size(); ++i) csv.row({path.grid[i], path.values[i]});
    return csv.str();
}

SampledPath path_from_csv(const std::string& text) {
    const auto table = io::parse_csv(text);
    SampledPath path{table.column("t"), table.column("f")};
    check_path(path);
    return path;
}

}  // namespace bbm
