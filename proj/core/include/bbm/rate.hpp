#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bbm/model.hpp"

namespace bbm {

inline constexpr std::size_t kDefaultGridIntervals = 2048;
inline constexpr double kExtinctionTolerance = 1e-9;
inline constexpr double kNeverExtinct = std::numeric_limits<double>::infinity();

/// A rescaled path f: [0,1] -> R sampled on a strictly increasing grid with
/// grid.front() == 0, grid.back() == 1 and values.front() == 0.
struct SampledPath {
    std::vector<double> grid;
    std::vector<double> values;

    std::size_t size() const { return grid.size(); }
    /// Piecewise-linear interpolation; s is clamped to [0, 1].
    double at(double s) const;
    /// Secant slope of the interval containing s.
    double slope_at(double s) const;
};

/// Uniform grid on [0,1] with n intervals (n + 1 points).
std::vector<double> uniform_grid(std::size_t intervals = kDefaultGridIntervals);

/// Samples a callable on a grid.
template <class F>
SampledPath sample_path(const F& f, std::vector<double> grid) {
    SampledPath path;
    path.values.reserve(grid.size());
    for (double s : grid) path.values.push_back(f(s));
    path.grid = std::move(grid);
    return path;
}

/// Throws DomainError unless the path satisfies the SampledPath invariants.
void check_path(const SampledPath& path);

/// Cumulative K(f, grid[i]) for a sampled path.
struct RateCurve {
    std::vector<double> grid;
    std::vector<double> K_values;
};

/// K(f,t) = int_0^t [m beta |f|^p - f'^2 / 2] ds evaluated on the
/// piecewise-linear interpolant of the samples: the slope is the secant slope
/// of each interval and |f|^p is integrated exactly along each linear piece.
RateCurve rate_functional(const PotentialParams& params, const SampledPath& f);

/// int_0^h |y0 + (y1 - y0) t / h|^p dt.
double linear_abs_pow_integral(double y0, double y1, double h, double p);

/// First-passage of K below -tol at grid resolution. Returns the grid time
/// just before the first dip (so a value in [0,1)), or +infinity.
double extinction_time(const RateCurve& curve, double tol = kExtinctionTolerance);

/// min over grid times s <= t of K(f, s), or exactly 0 when that minimum is
/// above -tol.
double presence_rate(const RateCurve& curve, double t, double tol = kExtinctionTolerance);

/// Two-column CSV "t,f".
std::string path_to_csv(const SampledPath& path);
SampledPath path_from_csv(const std::string& text);

}  // namespace bbm
