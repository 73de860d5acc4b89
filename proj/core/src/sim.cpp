#include "bbm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "bbm/io.hpp"
#include "bbm/parallel.hpp"

namespace bbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// SplitMix64. Eight bytes of state per particle keeps lineage streams cheap.
struct Stream {
    std::uint64_t state;

    std::uint64_t next() { return mix64(state += kGolden); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
    double open_uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1p-53; }
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(open_uniform()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    }
};

// Root state of stream `index` under `seed`; `salt` separates unrelated uses
// of the same seed.
std::uint64_t stream_root(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
    return mix64(seed ^ mix64(salt * kGolden + mix64(index + 1)));
}

constexpr std::uint64_t kTreeSalt = 1;
constexpr std::uint64_t kPathSalt = 2;
constexpr std::uint64_t kSpineSalt = 3;

struct Tube {
    std::function<double(double)> center;  // rescaled path, argument t / T
    double T = 1.0;
    double Tq = 1.0;
    double half_width = 1.0;  // epsilon T^q
    double t_end = 1.0;       // membership tested for t <= t_end
    bool kill = true;
    // Also count exits between steps, drawn from the Brownian-bridge crossing
    // probability exp(-2 d0 d1 / dt) at each wall.
    bool bridge = false;

    double offset(double t, double x) const { return x - Tq * center(t / T); }

    bool inside(double t, double x) const { return std::abs(offset(t, x)) < half_width; }

    double crossing_probability(double t0, double x0, double t1, double x1, double dt) const {
        const double y0 = offset(t0, x0), y1 = offset(t1, x1);
        const double up = std::exp(-2.0 * (half_width - y0) * (half_width - y1) / dt);
        const double down = std::exp(-2.0 * (half_width + y0) * (half_width + y1) / dt);
        return 1.0 - (1.0 - up) * (1.0 - down);
    }
};

struct StepGrid {
    std::size_t steps = 0;
    double dt = 0.0;
};

StepGrid step_grid(double t_end, double dt) {
    StepGrid g;
    g.steps = t_end > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_end / dt))) : 0;
    g.dt = g.steps > 0 ? t_end / static_cast<double>(g.steps) : dt;
    return g;
}

class OffspringSampler {
public:
    explicit OffspringSampler(const OffspringLaw& law) {
        double acc = 0.0;
        for (const auto& atom : law.pmf) {
            acc += atom.prob;
            cumulative_.push_back(acc);
            values_.push_back(atom.k);
        }
    }

    int draw(Stream& s) const {
        if (values_.size() == 1) return values_.front();
        const double u = s.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return values_[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), values_.size() - 1)];
    }

private:
    std::vector<double> cumulative_;
    std::vector<int> values_;
};

// One replicate's particles, stored column-wise.
class Population {
public:
    Population(const PotentialParams& params, double dt, std::uint64_t root, const Tube* tube, bool weights)
        : params_(params), offspring_(params.offspring), dt_(dt), sqrt_dt_(std::sqrt(dt)), tube_(tube),
          weights_(weights) {
        push(0.0, root, 1, 0.0, 0.0);
    }

    // Advances from t0 = k dt to t0 + dt. drift_weight = T^(q-1) f'(t0 / T)
    // multiplies the increment in the Girsanov integral.
    void step(std::size_t k, double drift_weight = 0.0) {
        const double t1 = static_cast<double>(k + 1) * dt_;
        const bool check_tube = tube_ && t1 <= tube_->t_end * (1.0 + 1e-12);
        const std::size_t n = x_.size();
        bool any_dead = false;
        for (std::size_t i = 0; i < n; ++i) {
            Stream s{rng_[i]};
            const double x0 = x_[i];
            const double prob = -std::expm1(-branch_rate(params_, x0) * dt_);
            max_prob_ = std::max(max_prob_, prob);
            const bool branches = s.uniform() < prob;
            const double dx = sqrt_dt_ * s.normal();
            const double x1 = x0 + dx;
            x_[i] = x1;
            if (weights_) {
                girsanov_[i] += drift_weight * dx;
                potential_[i] += abs_pow(x0, params_.p) * dt_;
            }
            bool exits = check_tube && in_tube_[i] && !tube_->inside(t1, x1);
            if (check_tube && in_tube_[i] && !exits && tube_->bridge)
                exits = s.uniform() < tube_->crossing_probability(t1 - dt_, x0, t1, x1, dt_);
            if (exits) {
                in_tube_[i] = 0;
                if (tube_->kill) {
                    alive_[i] = 0;
                    any_dead = true;
                    rng_[i] = s.state;
                    continue;
                }
            }
            if (branches) {
                const int extra = offspring_.draw(s);
                for (int j = 0; j < extra; ++j) {
                    const double g = weights_ ? girsanov_[i] : 0.0;
                    const double v = weights_ ? potential_[i] : 0.0;
                    push(x1, s.next(), in_tube_[i], g, v);
                }
            }
            rng_[i] = s.state;
        }
        if (any_dead) compact();
    }

    std::size_t size() const { return x_.size(); }
    double max_branch_probability() const { return max_prob_; }
    const std::vector<double>& positions() const { return x_; }
    const std::vector<double>& girsanov() const { return girsanov_; }
    const std::vector<double>& potential() const { return potential_; }

    double rightmost() const { return x_.empty() ? kNaN : *std::max_element(x_.begin(), x_.end()); }
    double tube_count() const {
        if (!tube_) return kNaN;
        return static_cast<double>(std::count(in_tube_.begin(), in_tube_.end(), std::uint8_t{1}));
    }

private:
    void push(double x, std::uint64_t rng, std::uint8_t in_tube, double g, double v) {
        x_.push_back(x);
        rng_.push_back(rng);
        in_tube_.push_back(in_tube);
        alive_.push_back(1);
        if (weights_) {
            girsanov_.push_back(g);
            potential_.push_back(v);
        }
    }

    void compact() {
        std::size_t out = 0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (!alive_[i]) continue;
            x_[out] = x_[i];
            rng_[out] = rng_[i];
            in_tube_[out] = in_tube_[i];
            if (weights_) {
                girsanov_[out] = girsanov_[i];
                potential_[out] = potential_[i];
            }
            ++out;
        }
        x_.resize(out);
        rng_.resize(out);
        in_tube_.resize(out);
        alive_.assign(out, 1);
        if (weights_) {
            girsanov_.resize(out);
            potential_.resize(out);
        }
    }

    const PotentialParams& params_;
    OffspringSampler offspring_;
    double dt_, sqrt_dt_;
    const Tube* tube_;
    bool weights_;
    double max_prob_ = 0.0;
    std::vector<double> x_;
    std::vector<std::uint64_t> rng_;
    std::vector<std::uint8_t> in_tube_;
    std::vector<std::uint8_t> alive_;
    std::vector<double> girsanov_;
    std::vector<double> potential_;
};

std::optional<Tube> make_tube(const SimConfig& config) {
    if (!config.tube) return std::nullopt;
    const TubeSpec& spec = *config.tube;
    Tube tube;
    tube.center = [f = spec.f](double s) { return f.at(s); };
    tube.T = config.horizon_T;
    tube.Tq = std::pow(config.horizon_T, config.params.q());
    tube.half_width = spec.epsilon * tube.Tq;
    tube.t_end = spec.theta * config.horizon_T;
    tube.kill = spec.kill_on_exit;
    return tube;
}

// Runs every replicate to t_end, recording at the given step indices.
SimOutcome simulate(const SimConfig& config, double t_end) {
    validate(config);
    const StepGrid grid = step_grid(t_end, config.dt);
    const auto tube = make_tube(config);

    SimOutcome out;
    out.config = config;
    std::vector<std::size_t> record_steps;
    for (double t : config.record_times) {
        const std::size_t k = static_cast<std::size_t>(std::llround(t / grid.dt));
        record_steps.push_back(std::min(k, grid.steps));
        out.times.push_back(static_cast<double>(record_steps.back()) * grid.dt);
    }
    const std::size_t n_rec = record_steps.size();

    out.replicates.resize(config.replicates);
    parallel_for(config.replicates, [&](std::size_t r) {
        ReplicateRecord rec;
        rec.population.assign(n_rec, kNaN);
        rec.rightmost.assign(n_rec, kNaN);
        rec.tube_count.assign(n_rec, kNaN);
        Population pop(config.params, grid.dt, stream_root(config.seed, kTreeSalt, r), tube ? &*tube : nullptr,
                       false);
        auto record = [&](std::size_t k) {
            for (std::size_t j = 0; j < n_rec; ++j) {
                if (record_steps[j] != k) continue;
                rec.population[j] = static_cast<double>(pop.size());
                rec.rightmost[j] = pop.rightmost();
                rec.tube_count[j] = pop.tube_count();
            }
        };
        record(0);
        for (std::size_t k = 0; k < grid.steps; ++k) {
            pop.step(k);
            rec.time_reached = static_cast<double>(k + 1) * grid.dt;
            if (pop.size() > config.max_particles) {
                rec.truncated = true;
                break;
            }
            record(k + 1);
        }
        rec.max_branch_probability = pop.max_branch_probability();
        out.replicates[r] = std::move(rec);
    });

    for (const auto& rec : out.replicates) {
        out.truncated_replicates += rec.truncated ? 1 : 0;
        out.max_branch_probability = std::max(out.max_branch_probability, rec.max_branch_probability);
    }
    out.truncated = out.truncated_replicates > 0;
    for (std::size_t j = 0; j < n_rec; ++j) {
        TimeStats ts;
        ts.time = out.times[j];
        std::vector<double> pop, right, tubes;
        for (const auto& rec : out.replicates) {
            pop.push_back(rec.population[j]);
            right.push_back(rec.rightmost[j]);
            tubes.push_back(rec.tube_count[j]);
        }
        ts.population = summarize(pop);
        ts.rightmost = summarize(right);
        ts.tube_count = summarize(tubes);
        out.stats.push_back(ts);
    }
    if (out.max_branch_probability > 0.1)
        out.warnings.push_back("per-step branch probability reached " + io::format_double(out.max_branch_probability) +
                               " > 0.1; reduce dt");
    if (out.truncated)
        out.warnings.push_back(std::to_string(out.truncated_replicates) + " replicate(s) exceeded max_particles = " +
                               std::to_string(config.max_particles));
    return out;
}

MeanEstimate mean_estimate(std::vector<double> samples) {
    MeanEstimate e;
    const Summary s = summarize(samples);
    e.mean = s.mean;
    e.std_error = s.std_error;
    e.samples = std::move(samples);
    return e;
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
    std::vector<double> v;
    for (double x : values)
        if (!std::isnan(x)) v.push_back(x);
    Summary s;
    s.count = v.size();
    if (v.empty()) {
        s.mean = s.median = s.std_error = kNaN;
        return s;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    s.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
    return s;
}

void validate(const SimConfig& config) {
    validate(config.params);
    if (!(config.horizon_T > 0.0) || !std::isfinite(config.horizon_T)) throw DomainError("horizon_T must be positive");
    if (!(config.dt > 0.0)) throw DomainError("dt must be positive");
    if (config.dt > config.horizon_T) throw DomainError("dt must not exceed horizon_T");
    if (config.replicates == 0) throw DomainError("replicates must be positive");
    if (config.max_particles == 0) throw DomainError("max_particles must be positive");
    for (double t : config.record_times)
        if (!(t >= 0.0 && t <= config.horizon_T * (1.0 + 1e-12)))
            throw DomainError("record time " + io::format_double(t) + " outside [0, horizon_T]");
    if (config.tube) {
        const TubeSpec& tube = *config.tube;
        if (!(tube.epsilon > 0.0)) throw DomainError("tube epsilon must be positive");
        if (!(tube.theta > 0.0 && tube.theta <= 1.0)) throw DomainError("tube theta must lie in (0, 1]");
        check_path(tube.f);
    }
}

SimOutcome run_bbm(const SimConfig& config) { return simulate(config, config.horizon_T); }

SimOutcome tube_count(const SimConfig& config) {
    if (!config.tube) throw DomainError("tube_count needs a tube");
    return simulate(config, config.horizon_T);
}

std::vector<GrowthEstimate> growth_rate_estimate(const SimConfig& config, const std::vector<double>& times) {
    if (times.empty()) throw DomainError("growth_rate_estimate needs at least one time");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
            throw DomainError("growth times must be positive and increasing");
    SimConfig c = config;
    c.horizon_T = times.back();
    c.record_times = times;
    c.tube.reset();
    const SimOutcome out = run_bbm(c);
    const double exponent = config.params.growth_exponent();
    std::vector<GrowthEstimate> result;
    for (std::size_t j = 0; j < times.size(); ++j) {
        GrowthEstimate g;
        g.time = out.times[j];
        for (const auto& rec : out.replicates)
            g.values.push_back(std::log(rec.population[j]) / std::pow(g.time, exponent));
        g.summary = summarize(g.values);
        result.push_back(std::move(g));
    }
    return result;
}

SampledPath SmoothPath::sampled(std::vector<double> grid) const {
    SampledPath path;
    path.grid = std::move(grid);
    for (double s : path.grid) path.values.push_back(value(s));
    return path;
}

SmoothPath SmoothPath::zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

SmoothPath SmoothPath::quadratic(double c) {
    return {[c](double s) { return c * s * s; }, [c](double s) { return 2.0 * c * s; },
            [c](double) { return 2.0 * c; }};
}

MeanEstimate martingale_check(const SimConfig& config, const SmoothPath& f, double epsilon, double t) {
    SimConfig c = config;
    c.tube.reset();
    c.record_times.clear();
    validate(c);
    if (!(epsilon > 0.0)) throw DomainError("tube epsilon must be positive");
    if (!(t >= 0.0 && t <= config.horizon_T)) throw DomainError("martingale time must lie in [0, T]");

    const double T = config.horizon_T, q = config.params.q();
    const double Tq = std::pow(T, q), Tq1 = std::pow(T, q - 1.0);
    const double mb = config.params.m_beta();
    Tube tube;
    tube.center = f.value;
    tube.T = T;
    tube.Tq = Tq;
    tube.half_width = epsilon * Tq;
    tube.t_end = t;
    tube.kill = true;
    tube.bridge = true;

    const StepGrid grid = step_grid(t, config.dt);
    // Deterministic parts of the exponent, with the same left-point rule as
    // the stochastic integral.
    std::vector<double> drift(grid.steps);
    double drift_sq = 0.0;
    for (std::size_t k = 0; k < grid.steps; ++k) {
        drift[k] = Tq1 * f.first(static_cast<double>(k) * grid.dt / T);
        drift_sq += drift[k] * drift[k] * grid.dt;
    }
    const double window = std::numbers::pi / (2.0 * epsilon * Tq);
    const double t_eff = static_cast<double>(grid.steps) * grid.dt;
    const double log_det = window * window * t_eff / 2.0 - 0.5 * drift_sq;
    const double centre = Tq * f.value(t_eff / T);

    std::vector<double> samples(config.replicates);
    parallel_for(config.replicates, [&](std::size_t r) {
        Population pop(config.params, grid.dt, stream_root(config.seed, kTreeSalt, r), &tube, true);
        for (std::size_t k = 0; k < grid.steps; ++k) {
            pop.step(k, drift[k]);
            if (pop.size() > config.max_particles)
                throw std::runtime_error("martingale replicate exceeded max_particles");
        }
        double z = 0.0;
        const auto& x = pop.positions();
        for (std::size_t i = 0; i < x.size(); ++i)
            z += std::exp(log_det + pop.girsanov()[i] - mb * pop.potential()[i]) *
                 std::cos(window * (x[i] - centre));
        samples[r] = z;
    });
    return mean_estimate(std::move(samples));
}

double ManyToOne::combined_std_error() const { return std::hypot(lhs.std_error, rhs.std_error); }

ManyToOne many_to_one_check(const PotentialParams& params, double t, const std::function<double(double)>& g,
                            std::size_t tree_replicates, std::size_t path_samples, double dt, std::uint64_t seed) {
    validate(params);
    if (!(t > 0.0) || !(dt > 0.0)) throw DomainError("many-to-one needs t > 0 and dt > 0");
    if (tree_replicates < 2 || path_samples < 2) throw DomainError("many-to-one needs at least two samples per side");
    const StepGrid grid = step_grid(t, dt);
    const double mb = params.m_beta();

    std::vector<double> lhs(tree_replicates);
    parallel_for(tree_replicates, [&](std::size_t r) {
        Population pop(params, grid.dt, stream_root(seed, kTreeSalt, r), nullptr, false);
        for (std::size_t k = 0; k < grid.steps; ++k) pop.step(k);
        double sum = 0.0;
        for (double x : pop.positions()) sum += g(x);
        lhs[r] = sum;
    });

    std::vector<double> rhs(path_samples);
    const double sqrt_dt = std::sqrt(grid.dt);
    parallel_for(path_samples, [&](std::size_t r) {
        Stream s{stream_root(seed, kPathSalt, r)};
        double x = 0.0, integral = 0.0;
        for (std::size_t k = 0; k < grid.steps; ++k) {
            integral += abs_pow(x, params.p) * grid.dt;
            x += sqrt_dt * s.normal();
        }
        rhs[r] = std::exp(mb * integral) * g(x);
    });

    ManyToOne out;
    out.lhs = mean_estimate(std::move(lhs));
    out.rhs = mean_estimate(std::move(rhs));
    return out;
}

SpinePath tilted_spine_path(const PotentialParams& params, const SmoothPath& f, double epsilon, double T,
                            std::uint64_t seed, double dt) {
    validate(params);
    if (!(epsilon > 0.0) || !(T > 0.0) || !(dt > 0.0)) throw DomainError("spine needs epsilon, T, dt > 0");
    const double Tq = std::pow(T, params.q());
    const double L = epsilon * Tq;
    const double k = std::numbers::pi / (2.0 * L);
    const double clamp = std::numbers::pi / 2.0 - 1e-6;
    Stream s{stream_root(seed, kSpineSalt, 0)};

    SpinePath out;
    out.path.grid = uniform_grid();
    out.path.values.assign(out.path.grid.size(), 0.0);
    // y = xi - T^q f(t/T) solves dy = -k tan(k y) dt + dW; the T^(q-1) f'
    // part of the drift is carried exactly by the centre.
    double y = 0.0, t = 0.0;
    for (std::size_t i = 1; i < out.path.grid.size(); ++i) {
        const double t_next = out.path.grid[i] * T;
        while (t < t_next) {
            const double d = L - std::abs(y);
            double h = std::min({dt, t_next - t, 0.01 * d * d});
            const double drift = -k * std::tan(std::clamp(k * y, -clamp, clamp));
            double y_new = y + drift * h + std::sqrt(h) * s.normal();
            int tries = 0;
            while (std::abs(y_new) >= L) {
                ++out.rejections;
                if (++tries % 16 == 0) h *= 0.5;
                y_new = y + drift * h + std::sqrt(h) * s.normal();
            }
            y = y_new;
            t = (t_next - t <= h) ? t_next : t + h;
            ++out.substeps;
            out.max_excursion = std::max(out.max_excursion, std::abs(y) / L);
        }
        out.path.values[i] = Tq * f.value(out.path.grid[i]) + y;
    }
    out.path.values.front() = 0.0;
    return out;
}

PresenceEstimate presence_probability(const SimConfig& config, const TubeSpec& tube, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("presence time must lie in [0, 1]");
    SimConfig c = config;
    c.tube = tube;
    c.tube->kill_on_exit = true;
    c.tube->theta = std::max(t, std::numeric_limits<double>::min());
    c.record_times = {t * config.horizon_T};
    const SimOutcome out = simulate(c, t * config.horizon_T);

    PresenceEstimate est;
    std::size_t hits = 0, counted = 0;
    for (const auto& rec : out.replicates) {
        if (rec.truncated) {
            // A truncated replicate still had particles in the tube.
            ++hits;
            ++counted;
            continue;
        }
        ++counted;
        hits += rec.tube_count[0] > 0.0 ? 1 : 0;
    }
    est.replicates = counted;
    est.frequency = static_cast<double>(hits) / static_cast<double>(counted);
    est.std_error = std::sqrt(est.frequency * (1.0 - est.frequency) / static_cast<double>(counted));
    const auto curve = rate_functional(config.params, tube.f);
    est.theory = std::exp(std::pow(config.horizon_T, config.params.growth_exponent()) * presence_rate(curve, t));
    return est;
}

namespace {

nlohmann::ordered_json summary_json(const Summary& s) {
    nlohmann::ordered_json j;
    j["mean"] = s.mean;
    j["stderr"] = s.std_error;
    j["median"] = s.median;
    j["count"] = s.count;
    return j;
}

}  // namespace

std::string outcome_to_json(const SimOutcome& out) {
    nlohmann::ordered_json j;
    const auto& c = out.config;
    j["seed"] = c.seed;
    j["params"] = {{"beta", c.params.beta}, {"p", c.params.p}, {"m", c.params.m}};
    j["horizon_T"] = c.horizon_T;
    j["dt"] = c.dt;
    j["replicates"] = c.replicates;
    j["max_particles"] = c.max_particles;
    j["tube"] = c.tube.has_value();
    j["truncated"] = out.truncated;
    j["truncated_replicates"] = out.truncated_replicates;
    j["max_branch_probability"] = out.max_branch_probability;
    j["warnings"] = out.warnings;
    auto times = nlohmann::ordered_json::array();
    for (const auto& ts : out.stats) {
        nlohmann::ordered_json row;
        row["time"] = ts.time;
        row["population"] = summary_json(ts.population);
        // For p = 0 the mean population is exactly e^(m beta t).
        if (c.params.p == 0.0) row["population_reference"] = std::exp(c.params.m_beta() * ts.time);
        row["rightmost"] = summary_json(ts.rightmost);
        if (c.tube) row["tube_count"] = summary_json(ts.tube_count);
        times.push_back(row);
    }
    j["times"] = times;
    return j.dump(2) + "\n";
}

std::string outcome_to_csv(const SimOutcome& out, const std::string& comment) {
    io::CsvWriter csv{"replicate", "time", "statistic", "value"};
    if (!comment.empty()) csv.set_comment(comment);
    for (std::size_t r = 0; r < out.replicates.size(); ++r) {
        const auto& rec = out.replicates[r];
        for (std::size_t j = 0; j < out.times.size(); ++j) {
            auto emit = [&](const char* name, double v) {
                if (std::isnan(v)) return;
                csv.row({std::to_string(r), io::format_double(out.times[j]), name, io::format_double(v)});
            };
            emit("population", rec.population[j]);
            emit("rightmost", rec.rightmost[j]);
            emit("tube_count", rec.tube_count[j]);
        }
    }
    return csv.str();
}

}  // namespace bbm
