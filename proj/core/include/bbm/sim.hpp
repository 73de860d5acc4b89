#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bbm/model.hpp"
#include "bbm/rate.hpp"

namespace bbm {

/// Tube {|X(sT) - T^q f(s)| < epsilon T^q for all s <= theta} around a
/// rescaled path f.
struct TubeSpec {
    SampledPath f;
    double epsilon = 0.1;
    double theta = 1.0;
    /// Remove particles as soon as they leave the tube. Tube counts are
    /// unchanged since descendants of an exited particle are never counted;
    /// population and rightmost statistics then refer to survivors only.
    bool kill_on_exit = true;
};

struct SimConfig {
    PotentialParams params;
    double horizon_T = 1.0;
    double dt = 1e-3;
    std::size_t max_particles = 50'000'000;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    std::optional<TubeSpec> tube;
    /// Absolute times in [0, horizon_T]; each is snapped to the nearest step.
    std::vector<double> record_times;
};

/// Replicate-level summary of one statistic at one record time. Replicates
/// that were truncated before the time are excluded.
struct Summary {
    double mean = 0.0;
    double std_error = 0.0;
    double median = 0.0;
    std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

struct ReplicateRecord {
    std::vector<double> population;  // per record time; NaN after truncation
    std::vector<double> rightmost;   // NaN when no particle is alive
    std::vector<double> tube_count;  // NaN when the config has no tube
    bool truncated = false;
    double time_reached = 0.0;
    double max_branch_probability = 0.0;
};

struct TimeStats {
    double time = 0.0;
    Summary population;
    Summary rightmost;
    Summary tube_count;
};

struct SimOutcome {
    SimConfig config;
    std::vector<double> times;  // record times after snapping to the step grid
    std::vector<ReplicateRecord> replicates;
    std::vector<TimeStats> stats;
    bool truncated = false;
    std::size_t truncated_replicates = 0;
    double max_branch_probability = 0.0;
    std::vector<std::string> warnings;
};

/// Checks the config; throws DomainError naming the violated condition.
void validate(const SimConfig& config);

/// Fixed-step simulation: every step each particle branches with probability
/// 1 - exp(-beta |x|^p dt) at its start position, then takes a Gaussian step of
/// variance dt; offspring appear at the parent's new position. Replicates run
/// in parallel and each particle draws from its own lineage-seeded stream, so
/// the outcome depends only on (config, seed). A population above
/// max_particles stops that replicate and marks it truncated.
SimOutcome run_bbm(const SimConfig& config);

/// run_bbm with a tube; the config must carry one.
SimOutcome tube_count(const SimConfig& config);

struct GrowthEstimate {
    double time = 0.0;
    std::vector<double> values;  // log N(T) / T^(2q-1) per replicate
    Summary summary;
};

/// Normalized log-population at each of the given (increasing) times,
/// from one run whose horizon is the last time.
std::vector<GrowthEstimate> growth_rate_estimate(const SimConfig& config, const std::vector<double>& times);

/// C^2 rescaled path given analytically.
struct SmoothPath {
    std::function<double(double)> value;
    std::function<double(double)> first;
    std::function<double(double)> second;

    SampledPath sampled(std::vector<double> grid = uniform_grid()) const;

    static SmoothPath zero();
    /// f(s) = c s^2.
    static SmoothPath quadratic(double c);
};

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> samples;
};

/// Replicate mean of Z_T(t) = sum over tube particles of the Girsanov weight,
/// the cosine window and exp(-m beta int |X|^p). The tube uses f and epsilon
/// over [0, t]; config.tube is ignored. Expected value 1.
MeanEstimate martingale_check(const SimConfig& config, const SmoothPath& f, double epsilon, double t);

struct ManyToOne {
    MeanEstimate lhs;  // E[sum over particles of g(X_u(t))]
    MeanEstimate rhs;  // E[exp(m beta int |xi|^p) g(xi_t)] over single paths
    double combined_std_error() const;
};

/// Both sides of the many-to-one identity for a statistic of the terminal
/// position. Tree replicates and single-path samples use separate streams.
ManyToOne many_to_one_check(const PotentialParams& params, double t, const std::function<double(double)>& g,
                            std::size_t tree_replicates, std::size_t path_samples, double dt,
                            std::uint64_t seed);

struct SpinePath {
    SampledPath path;  // xi(sT) on the default grid
    double max_excursion = 0.0;  // max |xi - T^q f| / (epsilon T^q) over all substeps
    std::size_t substeps = 0;
    std::size_t rejections = 0;
};

/// One spine path under the tilted measure: drift T^(q-1) f'(t/T) minus
/// (pi / (2 epsilon T^q)) tan(...) of the offset from the tube centre. The
/// offset is integrated directly, with substeps shrinking near the wall.
SpinePath tilted_spine_path(const PotentialParams& params, const SmoothPath& f, double epsilon, double T,
                            std::uint64_t seed, double dt = 1e-3);

struct PresenceEstimate {
    double frequency = 0.0;
    double std_error = 0.0;
    double theory = 0.0;  // exp(T^(2q-1) inf_{s<=t} K(f, s))
    std::size_t replicates = 0;
};

/// Fraction of replicates with a particle in the tube around f over [0, t T].
PresenceEstimate presence_probability(const SimConfig& config, const TubeSpec& tube, double t);

/// JSON object with metadata and per-time statistics; stable key order.
std::string outcome_to_json(const SimOutcome& outcome);

/// Long format: replicate,time,statistic,value.
std::string outcome_to_csv(const SimOutcome& outcome, const std::string& comment = {});

}  // namespace bbm
