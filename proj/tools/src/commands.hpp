#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bbm::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitUsage = 2,  // bad flags or config
    kExitSolver = 3,  // a solve or simulation failed
};

struct Options {
    std::string config_path;
    std::filesystem::path out_dir = "out";
    bool out_given = false;  // verify writes verify.json only when --out is given
    std::optional<std::uint64_t> seed;
    std::string level = "fast";
};

int cmd_paths(const Options& options, std::ostream& log);
int cmd_simulate(const Options& options, std::ostream& log);
int cmd_verify(const Options& options, std::ostream& log);
int cmd_figure(const Options& options, std::ostream& log);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bbm::cli
