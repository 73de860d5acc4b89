#include "bbm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bbm/euler_lagrange.hpp"
#include "bbm/io.hpp"
#include "bbm/model.hpp"
#include "bbm/profiles.hpp"
#include "bbm/sim.hpp"

namespace bbm {

VerifyLevel parse_verify_level(const std::string& text) {
    if (text == "fast") return VerifyLevel::fast;
    if (text == "full") return VerifyLevel::full;
    throw DomainError("unknown verify level '" + text + "' (expected fast or full)");
}

const char* to_string(VerifyLevel level) { return level == VerifyLevel::fast ? "fast" : "full"; }

const char* to_string(CriterionStatus status) {
    switch (status) {
        case CriterionStatus::pass: return "PASS";
        case CriterionStatus::fail: return "FAIL";
        case CriterionStatus::skipped: return "SKIP";
    }
    return "?";
}

bool VerifyReport::passed() const {
    return std::none_of(criteria.begin(), criteria.end(),
                        [](const CriterionResult& c) { return c.status == CriterionStatus::fail; });
}

namespace {

// Collects measurements and failed conditions for one criterion.
class Check {
public:
    explicit Check(CriterionResult& result) : result_(result) {}

    void measure(const std::string& key, double value) { result_.measured.emplace_back(key, value); }

    // Records value under key and requires value <= bound.
    void at_most(const std::string& key, double value, double bound) {
        measure(key, value);
        require(value <= bound, key + " = " + io::format_double(value) + " > " + io::format_double(bound));
    }

    void require(bool ok, const std::string& why) {
        if (ok) return;
        ok_ = false;
        if (!result_.detail.empty()) result_.detail += "; ";
        result_.detail += why;
    }

    bool ok() const { return ok_; }

private:
    CriterionResult& result_;
    bool ok_ = true;
};

using Body = std::function<void(Check&)>;

CriterionResult run_one(const char* id, const char* title, bool monte_carlo, bool enabled, const Body& body) {
    CriterionResult result;
    result.id = id;
    result.title = title;
    result.monte_carlo = monte_carlo;
    if (!enabled) {
        result.status = CriterionStatus::skipped;
        result.detail = "Monte Carlo criterion, run with level full";
        return result;
    }
    const auto start = std::chrono::steady_clock::now();
    Check check(result);
    try {
        body(check);
    } catch (const std::exception& e) {
        check.require(false, std::string("exception: ") + e.what());
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.status = check.ok() ? CriterionStatus::pass : CriterionStatus::fail;
    return result;
}

double sup_error(const SampledPath& path, const std::function<double(double)>& exact) {
    double worst = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i)
        worst = std::max(worst, std::abs(path.values[i] - exact(path.grid[i])));
    return worst;
}

const std::vector<double> kP1Endpoints{0.0, 0.1, 0.25, 0.4, 0.5};

void a1_paths(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    const auto params = make_params(1.0, 1.0);
    const double mb = params.m_beta();
    double worst_h = 0.0, worst_g = 0.0, worst_sz = 0.0;
    for (double z : kP1Endpoints) {
        const auto h = solve_unconstrained(params, z);
        worst_h = std::max(worst_h, sup_error(h.path, [&](double s) { return -0.5 * mb * s * s + (z + 0.5 * mb) * s; }));
        const auto g = solve_constrained(params, z);
        const double sz = 1.0 - std::sqrt(0.5 - z / mb);
        worst_sz = std::max(worst_sz, std::abs(g.s_switch - sz));
        worst_g = std::max(worst_g, sup_error(g.path, [&](double s) {
            if (s <= sz) return 0.5 * mb * s * s;
            const double d = s - sz;
            return 0.5 * mb * sz * sz + mb * sz * d - 0.5 * mb * d * d;
        }));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.at_most("sup_err_h", worst_h, 1e-6);
    c.at_most("sup_err_g", worst_g, 1e-6);
    c.at_most("s_z_err", worst_sz, 1e-8);
    c.at_most("seconds", seconds, 5.0);
}

void a2_profiles(Check& c) {
    const auto params = make_params(1.0, 1.0);
    const auto exp_prof = tabulate_profile(params, ProfileKind::expected,
                                           default_profile_grid(params, ProfileKind::expected, 101));
    const auto as_prof = tabulate_profile(params, ProfileKind::almost_sure,
                                          default_profile_grid(params, ProfileKind::almost_sure, 101));
    double e_exp = 0.0, e_as = 0.0;
    for (std::size_t i = 0; i < exp_prof.z_grid.size(); ++i) {
        const double z = exp_prof.z_grid[i];
        e_exp = std::max(e_exp, std::abs(exp_prof.K[i] - (1.0 / 24.0 + z / 2.0 - z * z / 2.0)));
    }
    for (std::size_t i = 0; i < as_prof.z_grid.size(); ++i) {
        const double z = as_prof.z_grid[i];
        const double exact = 0.5 - z - std::pow(std::max(0.0, 2.0 - 4.0 * z), 1.5) / 6.0;
        e_as = std::max(e_as, std::abs(as_prof.K[i] - exact));
    }
    c.at_most("max_err_K_exp", e_exp, 1e-6);
    c.at_most("max_err_K_as", e_as, 1e-6);
}

void a3_endpoints(Check& c) {
    OptimalEndpoint e[2][2];  // [beta index][kind]
    const double betas[2] = {1.0, 2.5};
    for (int b = 0; b < 2; ++b) {
        const auto params = make_params(betas[b], 1.0);
        const double mb = params.m_beta();
        e[b][0] = optimal_endpoint(params, ProfileKind::expected);
        e[b][1] = optimal_endpoint(params, ProfileKind::almost_sure);
        const std::string tag = "_mb" + io::format_double(mb);
        c.at_most("z_hat_exp_err" + tag, std::abs(e[b][0].z_hat - mb / 2.0), 1e-6);
        c.at_most("K_hat_exp_err" + tag, std::abs(e[b][0].K_hat - mb * mb / 6.0), 1e-6);
        c.at_most("z_hat_as_err" + tag, std::abs(e[b][1].z_hat - mb / 4.0), 1e-6);
        c.at_most("K_hat_as_err" + tag, std::abs(e[b][1].K_hat - mb * mb / 12.0), 1e-6);
    }
    // z scales like (m beta)^(1/(2-p)) and K like (m beta)^(2/(2-p)).
    const double lambda = betas[1] / betas[0];
    double worst = 0.0;
    for (int k = 0; k < 2; ++k) {
        worst = std::max(worst, std::abs(e[1][k].z_hat / (lambda * e[0][k].z_hat) - 1.0));
        worst = std::max(worst, std::abs(e[1][k].K_hat / (lambda * lambda * e[0][k].K_hat) - 1.0));
    }
    c.at_most("scaling_rel_err", worst, 1e-6);
}

void a4_formulas(Check& c) {
    double worst_z = 0.0, worst_K = 0.0;
    for (double p : {0.25, 0.5, 1.0, 1.5, 1.9}) {
        const auto params = make_params(1.0, p);
        for (auto kind : {ProfileKind::expected, ProfileKind::almost_sure}) {
            const auto e = optimal_endpoint(params, kind);
            const double cf = closed_form_z_hat(params, kind);
            worst_z = std::max(worst_z, std::abs(e.z_hat - cf));
            worst_K = std::max(worst_K, std::abs(e.K_hat - e.K_hat_identity));
        }
    }
    c.at_most("z_hat_vs_closed_form", worst_z, 1e-6);
    c.at_most("K_hat_identity_err", worst_K, 1e-8);
}

void a5_ode(Check& c) {
    double worst_ode = 0.0, worst_lemma = 0.0, worst_fd = 0.0;
    std::size_t negatives = 0;
    for (double p : {0.5, 1.0, 1.5}) {
        const auto params = make_params(1.0, p);
        for (auto kind : {ProfileKind::expected, ProfileKind::almost_sure}) {
            const auto profile = tabulate_profile(params, kind, default_profile_grid(params, kind, 101));
            const auto ode = verify_profile_ode(profile);
            worst_ode = std::max(worst_ode, ode.max_residual);
            negatives += ode.negative.size();
            worst_fd = std::max(worst_fd, finite_difference_check(profile).max_error);
            for (std::size_t i = 0; i < profile.z_grid.size(); ++i) {
                const auto r = kind == ProfileKind::expected ? solve_unconstrained(params, profile.z_grid[i], {})
                                                             : solve_constrained(params, profile.z_grid[i], {});
                worst_lemma = std::max(worst_lemma, std::abs(profile.K_prime[i] + r.endpoint_deriv));
            }
        }
    }
    c.at_most("ode_residual", worst_ode, 1e-4);
    c.at_most("negative_radicands", static_cast<double>(negatives), 0.0);
    c.at_most("K_prime_plus_slope", worst_lemma, 1e-8);
    c.at_most("fd_error", worst_fd, 1e-3);
}

void a6_origin(Check& c) {
    double worst = 0.0;
    for (double p : {0.5, 1.0, 1.5}) {
        const auto [lhs, rhs] = expected_origin_identity(make_params(1.0, p));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    c.at_most("origin_identity_err", worst, 1e-6);
}

void a7_p2_limit(Check& c) {
    const auto ratios = p2_limit_check({1.0, 1.9, 1.99});
    const double target = p2_target_ratio();
    for (const auto& r : ratios) c.measure("ratio_p" + io::format_double(r.p), r.ratio);
    c.measure("target", target);
    c.at_most("rel_dev_p1.99", std::abs(ratios[2].ratio / target - 1.0), 0.02);
    c.require(ratios[0].ratio > ratios[1].ratio && ratios[1].ratio > ratios[2].ratio,
              "ratio not monotone over p in {1, 1.9, 1.99}");
}

void a8_p0_oracle(Check& c, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const double T = 2.0, e2 = std::exp(T);
    SimConfig cfg;
    cfg.params = make_params(1.0, 0.0);
    cfg.horizon_T = T;
    cfg.replicates = 2000;
    cfg.seed = seed;
    cfg.record_times = {T};
    // Exact mean of the discretized process: each step multiplies E N by 2 - exp(-beta dt).
    auto discrete_mean = [&](double dt) { return std::pow(2.0 - std::exp(-dt), T / dt); };
    for (double dt : {1e-3, 5e-4}) {
        cfg.dt = dt;
        const auto out = run_bbm(cfg);
        const auto& s = out.stats.front().population;
        const std::string tag = "_dt" + io::format_double(dt);
        c.measure("mean_N" + tag, s.mean);
        c.measure("stderr" + tag, s.std_error);
        c.at_most("z_score" + tag, std::abs(s.mean - e2) / s.std_error, 3.0);
        c.measure("discrete_bias" + tag, discrete_mean(dt) - e2);
    }
    c.require(std::abs(discrete_mean(5e-4) - e2) < std::abs(discrete_mean(1e-3) - e2),
              "halving dt does not reduce the discretization bias");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.at_most("seconds", seconds, 120.0);
}

void a9_many_to_one(Check& c, std::uint64_t seed) {
    const auto m = many_to_one_check(make_params(1.0, 1.0), 1.0, [](double) { return 1.0; }, 2000, 5000, 1e-3, seed);
    c.measure("lhs", m.lhs.mean);
    c.measure("rhs", m.rhs.mean);
    c.measure("combined_stderr", m.combined_std_error());
    c.at_most("z_score", std::abs(m.lhs.mean - m.rhs.mean) / m.combined_std_error(), 3.0);
}

void a10_martingale(Check& c, std::uint64_t seed) {
    SimConfig cfg;
    cfg.params = make_params(1.0, 1.0);
    cfg.horizon_T = 1.0;
    cfg.replicates = 5000;
    cfg.seed = seed;
    const auto z = martingale_check(cfg, SmoothPath::quadratic(0.25), 0.5, 0.5);
    c.measure("mean_Z", z.mean);
    c.measure("stderr", z.std_error);
    c.at_most("z_score", std::abs(z.mean - 1.0) / z.std_error, 3.0);
}

void a11_spine(Check& c, std::uint64_t seed) {
    const auto params = make_params(1.0, 1.0);
    const auto f = SmoothPath::quadratic(0.25);
    const double eps = 0.5, T = 1.0, Tq = std::pow(T, params.q());
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto spine = tilted_spine_path(params, f, eps, T, seed + i);
        worst = std::max(worst, spine.max_excursion);
        bool bad = spine.max_excursion > 1.0;
        for (std::size_t j = 0; j < spine.path.size(); ++j)
            bad = bad || std::abs(spine.path.values[j] - Tq * f.value(spine.path.grid[j])) > eps * Tq;
        violations += bad ? 1 : 0;
    }
    c.measure("max_excursion", worst);
    c.at_most("violations", static_cast<double>(violations), 0.0);
}

// Runs under a 2e6 particle cap. Without killing the population never
// shrinks, so a truncated replicate outranks every finished one and the log N
// medians stay exact while fewer than half are truncated. The rightmost
// position of a truncated replicate is unknown, so its median is bracketed.
void a12_trends(Check& c, std::uint64_t seed) {
    SimConfig cfg;
    cfg.params = make_params(1.0, 1.0);
    cfg.replicates = 25;
    cfg.seed = seed;
    cfg.max_particles = 2'000'000;
    const std::vector<double> times{3.0, 4.0, 5.0};
    cfg.horizon_T = times.back();
    cfg.record_times = times;
    const auto out = run_bbm(cfg);
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t censored = out.truncated_replicates;
    c.measure("truncated_replicates", static_cast<double>(censored));
    c.require(2 * censored < out.replicates.size(), "half or more replicates hit the particle cap");

    std::vector<double> medians;
    for (std::size_t j = 0; j < times.size(); ++j) {
        std::vector<double> v;
        for (const auto& rec : out.replicates) {
            const double n = rec.population[j];
            v.push_back(std::isnan(n) ? inf : std::log(n) / std::pow(times[j], 3.0));
        }
        medians.push_back(summarize(v).median);
        c.measure("median_logN_over_T3_T" + io::format_double(times[j]), medians.back());
    }
    c.require(medians[0] < medians[1] && medians[1] < medians[2], "median growth estimate not increasing in T");
    c.require(medians[2] < 1.0 / 6.0, "median growth estimate at T=5 not below 1/6");

    std::vector<double> low, high;
    for (const auto& rec : out.replicates) {
        const double r = rec.rightmost.back() / 25.0;
        low.push_back(std::isnan(r) ? -inf : r);
        high.push_back(std::isnan(r) ? inf : r);
    }
    const double speed_low = summarize(low).median, speed_high = summarize(high).median;
    c.measure("median_R_over_T2_low", speed_low);
    c.measure("median_R_over_T2_high", speed_high);
    c.require(speed_low >= 0.3 && speed_high <= 0.7, "median R_T/T^2 not inside [0.3, 0.7]");

    SimConfig pc;
    pc.params = cfg.params;
    pc.horizon_T = 4.0;
    pc.replicates = 500;
    pc.seed = seed + 1;
    TubeSpec tube;
    tube.f = SmoothPath{[](double s) { return s; }, [](double) { return 1.0; }, [](double) { return 0.0; }}.sampled();
    tube.epsilon = 0.1;
    const auto presence = presence_probability(pc, tube, 1.0);
    c.measure("presence_theory", presence.theory);
    c.at_most("presence_frequency", presence.frequency, 0.05);
}

}  // namespace

VerifyReport run_acceptance(VerifyLevel level, std::uint64_t seed, void (*progress)(const CriterionResult&)) {
    VerifyReport report;
    report.level = level;
    const bool mc = level == VerifyLevel::full;
    auto add = [&](CriterionResult r) {
        if (progress) progress(r);
        report.criteria.push_back(std::move(r));
    };
    add(run_one("A1", "p=1 closed-form paths", false, true, a1_paths));
    add(run_one("A2", "p=1 closed-form profiles", false, true, a2_profiles));
    add(run_one("A3", "p=1 optimal endpoints and scaling", false, true, a3_endpoints));
    add(run_one("A4", "z_hat closed forms and K_hat identity", false, true, a4_formulas));
    add(run_one("A5", "profile ODE residual", false, true, a5_ode));
    add(run_one("A6", "expected origin identity", false, true, a6_origin));
    add(run_one("A7", "p -> 2 ratio", false, true, a7_p2_limit));
    add(run_one("A8", "p=0 mean population", true, mc, [&](Check& c) { a8_p0_oracle(c, seed + 8); }));
    add(run_one("A9", "many-to-one", true, mc, [&](Check& c) { a9_many_to_one(c, seed + 9); }));
    add(run_one("A10", "martingale mean one", true, mc, [&](Check& c) { a10_martingale(c, seed + 10); }));
    add(run_one("A11", "spine confinement", true, mc, [&](Check& c) { a11_spine(c, seed + 11); }));
    add(run_one("A12", "growth, speed and presence trends", true, mc, [&](Check& c) { a12_trends(c, seed + 12); }));
    return report;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream out;
    out << r.id << ' ' << to_string(r.status) << "  " << r.title;
    for (const auto& [key, value] : r.measured) out << "  " << key << '=' << io::format_double(value);
    if (!r.detail.empty()) out << "  [" << r.detail << ']';
    if (r.status != CriterionStatus::skipped) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " (%.2f s)", r.seconds);
        out << buf;
    }
    return out.str();
}

std::string report_to_json(const VerifyReport& report) {
    nlohmann::ordered_json j;
    j["level"] = to_string(report.level);
    j["passed"] = report.passed();
    auto list = nlohmann::ordered_json::array();
    for (const auto& r : report.criteria) {
        nlohmann::ordered_json item;
        item["id"] = r.id;
        item["title"] = r.title;
        item["monte_carlo"] = r.monte_carlo;
        item["status"] = to_string(r.status);
        nlohmann::ordered_json measured = nlohmann::ordered_json::object();
        for (const auto& [key, value] : r.measured) measured[key] = value;
        item["measured"] = measured;
        item["detail"] = r.detail;
        item["seconds"] = r.seconds;
        list.push_back(item);
    }
    j["criteria"] = list;
    return j.dump(2) + "\n";
}

}  // namespace bbm
