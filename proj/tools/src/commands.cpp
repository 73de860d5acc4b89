#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <ostream>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbm/acceptance.hpp"
#include "bbm/euler_lagrange.hpp"
#include "bbm/io.hpp"
#include "bbm/model.hpp"
#include "bbm/profiles.hpp"
#include "bbm/sim.hpp"
#include "bbm/version.hpp"
#include "config.hpp"

namespace bbm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// A solve or simulation failed; maps to kExitSolver.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Writes artifacts under one directory, stamping each with the run digest.
class Artifacts {
public:
    Artifacts(fs::path root, std::string digest) : root_(std::move(root)), digest_(std::move(digest)) {}

    const std::string& digest() const { return digest_; }
    std::string comment() const { return "run_digest=" + digest_; }

    void text(const fs::path& rel, const std::string& content) {
        io::write_file_atomic(root_ / rel, content);
        written_.push_back(rel.generic_string());
    }

    void json_file(const fs::path& rel, json j) {
        j["run_digest"] = digest_;
        text(rel, j.dump(2) + "\n");
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path root_;
    std::string digest_;
    std::vector<std::string> written_;
};

json manifest(const std::string& subcommand, const Artifacts& art, const Options& options,
              std::optional<std::uint64_t> seed, double seconds) {
    json j;
    j["subcommand"] = subcommand;
    j["config"] = options.config_path;
    j["config_digest"] = art.digest();
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["tool_version"] = kVersion;
    j["outputs"] = art.written();
    j["wall_clock_seconds"] = seconds;
    return j;
}

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

OffspringLaw offspring_from(const Config& config) {
    const auto ks = config.numbers("offspring_k", std::vector<double>{1.0});
    const auto probs = config.numbers("offspring_prob", std::vector<double>(ks.size(), 1.0 / static_cast<double>(ks.size())));
    if (ks.size() != probs.size()) throw ConfigError("offspring_k and offspring_prob differ in length");
    OffspringLaw law;
    law.pmf.clear();
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] != std::floor(ks[i])) throw ConfigError("offspring_k must hold integers");
        law.pmf.push_back({static_cast<int>(ks[i]), probs[i]});
    }
    return law;
}

// Validation failures of user-supplied parameters are config errors.
PotentialParams params_from(double beta, double p, const OffspringLaw& law) {
    try {
        return validate(make_params(beta, p, law));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
}

std::string tag(double v) { return io::format_double(v); }

template <class F>
auto solver_step(const std::string& what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw SolverFailure(what + ": " + e.what());
    }
}

const std::set<std::string> kParamKeys{"beta", "p", "offspring_k", "offspring_prob"};

std::set<std::string> with_params(std::set<std::string> keys) {
    keys.insert(kParamKeys.begin(), kParamKeys.end());
    return keys;
}

std::string frontier_csv(const PotentialParams& params, const std::string& comment) {
    const auto path = frontier_path(params);
    io::CsvWriter csv{"s", "f"};
    csv.set_comment(comment);
    for (std::size_t i = 0; i < path.size(); ++i) csv.row({path.grid[i], path.values[i]});
    return csv.str();
}

json endpoint_json(const OptimalEndpoint& e) {
    json j;
    j["z_hat"] = e.z_hat;
    j["K_hat"] = e.K_hat;
    j["K_hat_identity"] = e.K_hat_identity;
    return j;
}

void write_paths_for(Artifacts& art, const fs::path& dir, const PotentialParams& params,
                     const std::vector<double>& z_exp, const std::vector<double>& z_as, std::size_t points) {
    const std::string where = "p=" + tag(params.p) + " beta=" + tag(params.beta);
    art.text(dir / "frontier.csv", frontier_csv(params, art.comment()));
    for (double z : z_exp) {
        const auto r = solver_step(where + ": h_z failed at z = " + tag(z), [&] { return solve_unconstrained(params, z); });
        art.text(dir / ("h_z" + tag(z) + ".csv"), result_to_csv(r, art.comment()));
        art.json_file(dir / ("h_z" + tag(z) + ".json"), json::parse(result_to_json(r)));
    }
    for (double z : z_as) {
        const auto r = solver_step(where + ": g_z failed at z = " + tag(z), [&] { return solve_constrained(params, z); });
        art.text(dir / ("g_z" + tag(z) + ".csv"), result_to_csv(r, art.comment()));
        art.json_file(dir / ("g_z" + tag(z) + ".json"), json::parse(result_to_json(r)));
    }
    json endpoints;
    endpoints["p"] = params.p;
    endpoints["beta"] = params.beta;
    endpoints["m"] = params.m;
    endpoints["z_bar"] = frontier_endpoint(params);
    for (auto kind : {ProfileKind::expected, ProfileKind::almost_sure}) {
        const std::string name = to_string(kind);
        const auto profile = solver_step(where + ": " + name + " profile", [&] {
            return tabulate_profile(params, kind, default_profile_grid(params, kind, points));
        });
        art.text(dir / ("profile_" + name + ".csv"), profile_to_csv(profile, art.comment()));
        endpoints[name] = endpoint_json(solver_step(where + ": " + name + " endpoint",
                                                    [&] { return optimal_endpoint(params, kind); }));
    }
    art.json_file(dir / "endpoints.json", endpoints);
}

std::size_t profile_points(const Config& config) {
    const auto n = config.integer("profile_points", 101);
    if (n < 2) throw ConfigError("profile_points must be at least 2");
    return static_cast<std::size_t>(n);
}

// Parses the tube description of a simulate config.
std::optional<TubeSpec> tube_from(const Config& config, const PotentialParams& params) {
    if (!config.has("tube_path")) return std::nullopt;
    const std::string kind = config.string("tube_path");
    TubeSpec tube;
    tube.epsilon = config.number("tube_epsilon");
    tube.theta = config.number("tube_theta", 1.0);
    tube.kill_on_exit = config.boolean("tube_kill_on_exit", true);
    const double c = config.number("tube_coefficient", 0.0);
    if (kind == "zero") {
        tube.f = SmoothPath::zero().sampled();
    } else if (kind == "linear") {
        tube.f = SmoothPath{[c](double s) { return c * s; }, [c](double) { return c; }, [](double) { return 0.0; }}.sampled();
    } else if (kind == "quadratic") {
        tube.f = SmoothPath::quadratic(c).sampled();
    } else if (kind == "frontier") {
        tube.f = frontier_path(params);
    } else if (kind == "optimal_almost_sure" || kind == "optimal_expected") {
        const double z = config.number("tube_z");
        tube.f = solver_step("tube path at z = " + tag(z), [&] {
            return kind == "optimal_expected" ? solve_unconstrained(params, z).path : solve_constrained(params, z).path;
        });
    } else if (kind == "file") {
        const std::string file = config.string("tube_file");
        try {
            tube.f = path_from_csv(io::read_file(file));
        } catch (const std::exception& e) {
            throw ConfigError("tube_file '" + file + "': " + e.what());
        }
    } else {
        throw ConfigError("unknown tube_path '" + kind +
                          "' (zero, linear, quadratic, frontier, optimal_almost_sure, optimal_expected, file)");
    }
    return tube;
}

}  // namespace

int cmd_paths(const Options& options, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const Config config = Config::load(options.config_path);
    config.require_known(with_params({"z", "z_expected", "z_almost_sure", "profile_points"}));
    const auto z = config.numbers("z", std::vector<double>{});
    const auto z_exp = config.numbers("z_expected", z);
    const auto z_as = config.numbers("z_almost_sure", z);
    const auto points = profile_points(config);
    const auto law = offspring_from(config);
    std::vector<PotentialParams> all;
    for (double p : config.numbers("p", std::vector<double>{1.0}))
        for (double beta : config.numbers("beta", std::vector<double>{1.0})) all.push_back(params_from(beta, p, law));

    Artifacts art(options.out_dir, config.digest());
    for (const auto& params : all) {
        const fs::path dir = "p" + tag(params.p) + "_beta" + tag(params.beta);
        write_paths_for(art, dir, params, z_exp, z_as, points);
        log << "paths: wrote " << dir.string() << "\n";
    }
    io::write_file_atomic(options.out_dir / "manifest.json",
                          manifest("paths", art, options, std::nullopt, elapsed(start)).dump(2) + "\n");
    return kExitOk;
}

int cmd_simulate(const Options& options, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    Config config = Config::load(options.config_path);
    config.require_known(with_params({"horizon_T", "dt", "max_particles", "replicates", "seed", "record_times",
                                      "tube_path", "tube_epsilon", "tube_theta", "tube_kill_on_exit",
                                      "tube_coefficient", "tube_z", "tube_file"}));
    if (options.seed) config.set("seed", std::to_string(*options.seed));
    if (!config.has("seed")) throw ConfigError("a seed is required (--seed N or seed = N in the config)");

    SimConfig sim;
    sim.params = params_from(config.number("beta", 1.0), config.number("p", 1.0), offspring_from(config));
    sim.horizon_T = config.number("horizon_T");
    sim.dt = config.number("dt", 1e-3);
    const auto cap = config.integer("max_particles", 50'000'000);
    const auto reps = config.integer("replicates", 1);
    if (cap < 1) throw ConfigError("max_particles must be positive");
    if (reps < 1) throw ConfigError("replicates must be positive");
    sim.max_particles = static_cast<std::size_t>(cap);
    sim.replicates = static_cast<std::size_t>(reps);
    sim.seed = config.unsigned_integer("seed");
    sim.record_times = config.numbers("record_times", std::vector<double>{sim.horizon_T});
    sim.tube = tube_from(config, sim.params);
    try {
        validate(sim);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid simulation config: ") + e.what());
    }

    const auto outcome = solver_step("simulation", [&] { return run_bbm(sim); });
    for (const auto& w : outcome.warnings) log << "warning: " << w << "\n";

    Artifacts art(options.out_dir, config.digest());
    art.json_file("simulation.json", json::parse(outcome_to_json(outcome)));
    art.text("simulation.csv", outcome_to_csv(outcome, art.comment()));
    io::write_file_atomic(options.out_dir / "manifest.json",
                          manifest("simulate", art, options, sim.seed, elapsed(start)).dump(2) + "\n");
    log << "simulate: " << sim.replicates << " replicate(s)" << (outcome.truncated ? ", truncated" : "") << "\n";
    return kExitOk;
}

int cmd_verify(const Options& options, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    VerifyLevel level;
    try {
        level = parse_verify_level(options.level);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    static std::ostream* sink = nullptr;
    sink = &log;
    const auto report = run_acceptance(level, kAcceptanceSeed, [](const CriterionResult& r) {
        *sink << format_line(r) << std::endl;
    });
    log << (report.passed() ? "verify: all criteria passed" : "verify: FAILED") << " (level " << to_string(level)
        << ")\n";
    if (options.out_given) {
        Config c = Config::parse("level = " + options.level);
        Artifacts art(options.out_dir, c.digest());
        art.json_file("verify.json", json::parse(report_to_json(report)));
        io::write_file_atomic(options.out_dir / "manifest.json",
                              manifest("verify", art, options, kAcceptanceSeed, elapsed(start)).dump(2) + "\n");
    }
    return report.passed() ? kExitOk : kExitVerifyFailed;
}

int cmd_figure(const Options& options, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const Config config = options.config_path.empty() ? Config{} : Config::load(options.config_path);
    config.require_known(with_params({"z", "profile_points"}));
    const auto params = params_from(config.number("beta", 1.0), config.number("p", 1.0), offspring_from(config));
    const auto zs = config.numbers("z", std::vector<double>{0.0, 0.1, 0.25, 0.4, 0.5});
    const auto points = profile_points(config);

    Artifacts art(options.out_dir, config.digest());
    const auto grid = uniform_grid();
    std::vector<std::string> header{"s", "r"};
    std::vector<SampledPath> columns{frontier_path(params, grid)};
    for (double z : zs) {
        header.push_back("g_" + tag(z));
        columns.push_back(solver_step("g_z failed at z = " + tag(z), [&] { return solve_constrained(params, z, grid).path; }));
    }
    for (double z : zs) {
        header.push_back("h_" + tag(z));
        columns.push_back(solver_step("h_z failed at z = " + tag(z), [&] { return solve_unconstrained(params, z, grid).path; }));
    }
    io::CsvWriter paths(header);
    paths.set_comment(art.comment());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row{io::format_double(grid[i])};
        for (const auto& c : columns) row.push_back(io::format_double(c.values[i]));
        paths.row(row);
    }
    art.text("figure_paths.csv", paths.str());
    for (auto kind : {ProfileKind::almost_sure, ProfileKind::expected}) {
        const auto profile = solver_step(std::string(to_string(kind)) + " profile", [&] {
            return tabulate_profile(params, kind, default_profile_grid(params, kind, points));
        });
        art.text(std::string("figure_profile_") + to_string(kind) + ".csv", profile_to_csv(profile, art.comment()));
    }
    io::write_file_atomic(options.out_dir / "manifest.json",
                          manifest("figure", art, options, std::nullopt, elapsed(start)).dump(2) + "\n");
    log << "figure: wrote " << art.written().size() << " files to " << options.out_dir.string() << "\n";
    return kExitOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal paths, growth profiles and Monte Carlo checks for branching Brownian motion "
                 "with breeding rate beta |x|^p"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options options;
    std::string out_dir;
    std::uint64_t seed = 0;

    auto* paths = app.add_subcommand("paths", "Solve optimal paths and growth profiles");
    paths->add_option("--config", options.config_path, "Config file")->required();
    paths->add_option("--out", out_dir, "Output directory (default out)");

    auto* simulate = app.add_subcommand("simulate", "Run the branching Brownian motion simulator");
    simulate->add_option("--config", options.config_path, "Config file")->required();
    simulate->add_option("--out", out_dir, "Output directory (default out)");
    auto* seed_opt = simulate->add_option("--seed", seed, "64-bit seed; overrides the config");

    auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
    verify->add_option("--level", options.level, "fast or full (default fast)");
    verify->add_option("--out", out_dir, "Write verify.json here");

    auto* figure = app.add_subcommand("figure", "Emit data for the p = 1 paths and profiles figure");
    figure->add_option("--config", options.config_path, "Optional config file");
    figure->add_option("--out", out_dir, "Output directory (default out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (!out_dir.empty()) {
        options.out_dir = out_dir;
        options.out_given = true;
    }
    if (*seed_opt) options.seed = seed;

    try {
        if (*paths) return cmd_paths(options, out);
        if (*simulate) return cmd_simulate(options, out);
        if (*verify) return cmd_verify(options, out);
        if (*figure) return cmd_figure(options, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SolverFailure& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}

}  // namespace bbm::cli
