#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbm/io.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace bbm::cli {
namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult invoke(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"bbm"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bbm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const std::string& name, const std::string& text) {
        const fs::path path = dir_ / name;
        std::ofstream(path) << text;
        return path.string();
    }
    std::string out(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST(ConfigGrammar, ParsesScalarsListsAndComments) {
    const auto c = Config::parse(
        "# header\n"
        "p = 1.5   # trailing\n"
        "z = [0, 0.25, 1e-1]\n"
        "empty = []\n"
        "name = \"a # b\"\n"
        "flag = true\n"
        "seed = 18446744073709551615\n");
    EXPECT_DOUBLE_EQ(c.number("p"), 1.5);
    EXPECT_EQ(c.numbers("z"), (std::vector<double>{0.0, 0.25, 0.1}));
    EXPECT_TRUE(c.numbers("empty").empty());
    EXPECT_EQ(c.string("name"), "a # b");
    EXPECT_TRUE(c.boolean("flag"));
    EXPECT_EQ(c.unsigned_integer("seed"), 18446744073709551615ull);
    EXPECT_EQ(c.numbers("p"), std::vector<double>{1.5});
    EXPECT_DOUBLE_EQ(c.number("missing", 2.0), 2.0);
}

TEST(ConfigGrammar, RejectsMalformedInput) {
    for (const char* text : {"p 1", "p = ", "1p = 2", "p = 1\np = 2", "z = [1, 2", "z = [1,,2]", "s = \"open",
                             "z = 1, 2"})
        EXPECT_THROW(Config::parse(text), ConfigError) << text;
    const auto c = Config::parse("p = abc\nq = \"1\"\nflag = yes");
    EXPECT_THROW(c.number("p"), ConfigError);
    EXPECT_THROW(c.number("q"), ConfigError);
    EXPECT_THROW(c.boolean("flag"), ConfigError);
    EXPECT_THROW(c.number("absent"), ConfigError);
    EXPECT_THROW(Config::parse("x = 1").require_known({"y"}), ConfigError);
}

TEST(ConfigGrammar, ErrorsNameTheLine) {
    try {
        Config::parse("p = 1\n\nbad line\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(ConfigDigest, StableUnderReorderingAndNumberSpelling) {
    const auto a = Config::parse("p = 1\nbeta = 0.5\nz = [0.1, 0.2]\n");
    const auto b = Config::parse("# comment\nz = [ 1e-1 , 2.0e-1 ]\nbeta=.5\n\np = 1.0\n");
    EXPECT_EQ(a.digest(), b.digest());
    EXPECT_EQ(a.digest().size(), 16u);
    EXPECT_NE(a.digest(), Config::parse("p = 1\nbeta = 0.5\nz = [0.1, 0.3]\n").digest());
    EXPECT_NE(Config::parse("seed = 9007199254740993").digest(), Config::parse("seed = 9007199254740992").digest());
}

TEST(ConfigDigest, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
}

TEST_F(CliTest, PathsWritesStampedArtifacts) {
    const auto cfg = write_config("paths.cfg", "p = 1\nbeta = 1\nz = [0, 0.25]\nprofile_points = 11\n");
    const auto r = invoke({"paths", "--config", cfg, "--out", out("o")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string digest = Config::load(cfg).digest();
    const fs::path sub = dir_ / "o" / "p1_beta1";
    for (const char* name : {"frontier.csv", "h_z0.csv", "h_z0.25.csv", "g_z0.csv", "g_z0.25.csv",
                             "profile_expected.csv", "profile_almost_sure.csv"}) {
        ASSERT_TRUE(fs::exists(sub / name)) << name;
        EXPECT_EQ(io::read_file((sub / name).string()).rfind("# run_digest=" + digest, 0), 0u) << name;
    }
    const auto endpoints = nlohmann::json::parse(io::read_file((sub / "endpoints.json").string()));
    EXPECT_EQ(endpoints["run_digest"], digest);
    EXPECT_NEAR(endpoints["z_bar"].get<double>(), 0.5, 1e-12);
    const auto manifest = nlohmann::json::parse(io::read_file(out("o/manifest.json")));
    EXPECT_EQ(manifest["subcommand"], "paths");
    EXPECT_EQ(manifest["config_digest"], digest);
    EXPECT_TRUE(manifest["seed"].is_null());
}

TEST_F(CliTest, PathsRerunIsByteIdentical) {
    const auto cfg = write_config("paths.cfg", "p = 1.5\nbeta = 8\nz = [0.1]\nprofile_points = 9\n");
    ASSERT_EQ(invoke({"paths", "--config", cfg, "--out", out("a")}).code, kExitOk);
    ASSERT_EQ(invoke({"paths", "--config", cfg, "--out", out("b")}).code, kExitOk);
    for (const char* name : {"g_z0.1.csv", "h_z0.1.csv", "profile_expected.csv"})
        EXPECT_EQ(io::read_file(out(std::string("a/p1.5_beta8/") + name)),
                  io::read_file(out(std::string("b/p1.5_beta8/") + name)))
            << name;
}

TEST_F(CliTest, EmptyZListWritesOnlyProfiles) {
    const auto cfg = write_config("paths.cfg", "z = []\nprofile_points = 5\n");
    ASSERT_EQ(invoke({"paths", "--config", cfg, "--out", out("o")}).code, kExitOk);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir_ / "o" / "p1_beta1")) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    EXPECT_EQ(names, (std::vector<std::string>{"endpoints.json", "frontier.csv", "profile_almost_sure.csv",
                                               "profile_expected.csv"}));
}

TEST_F(CliTest, EndpointBeyondFrontierIsASolverFailureNamingZ) {
    const auto cfg = write_config("paths.cfg", "p = 1\nz_expected = []\nz_almost_sure = [0.75]\n");
    const auto r = invoke({"paths", "--config", cfg, "--out", out("o")});
    EXPECT_EQ(r.code, kExitSolver);
    EXPECT_NE(r.err.find("z = 0.75"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigErrorsExitWithUsageCode) {
    const auto unknown = write_config("u.cfg", "p = 1\nbogus = 2\n");
    auto r = invoke({"paths", "--config", unknown, "--out", out("o")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("bogus"), std::string::npos);
    const auto bad_p = write_config("p.cfg", "p = 2\n");
    EXPECT_EQ(invoke({"paths", "--config", bad_p, "--out", out("o")}).code, kExitUsage);
    EXPECT_EQ(invoke({"paths", "--config", out("missing.cfg")}).code, kExitUsage);
    EXPECT_EQ(invoke({"paths"}).code, kExitUsage);
    EXPECT_EQ(invoke({"nonsense"}).code, kExitUsage);
}

TEST_F(CliTest, SimulateRequiresASeed) {
    const auto cfg = write_config("s.cfg", "horizon_T = 1\ndt = 0.01\n");
    const auto r = invoke({"simulate", "--config", cfg, "--out", out("o")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST_F(CliTest, SimulateIsReproducibleAndSeedFlagOverrides) {
    const auto cfg = write_config("s.cfg", "p = 1\nhorizon_T = 1\ndt = 0.01\nreplicates = 4\nseed = 7\n");
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", out("a")}).code, kExitOk);
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", out("b")}).code, kExitOk);
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", out("c"), "--seed", "8"}).code, kExitOk);
    const auto a = io::read_file(out("a/simulation.csv"));
    EXPECT_EQ(a, io::read_file(out("b/simulation.csv")));
    EXPECT_NE(a, io::read_file(out("c/simulation.csv")));
    const auto manifest = nlohmann::json::parse(io::read_file(out("c/manifest.json")));
    EXPECT_EQ(manifest["seed"], 8u);
}

TEST_F(CliTest, TruncatedSimulationStillSucceeds) {
    const auto cfg = write_config("s.cfg", "p = 0\nhorizon_T = 10\ndt = 0.01\nmax_particles = 20\nseed = 1\n");
    const auto r = invoke({"simulate", "--config", cfg, "--out", out("o")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(io::read_file(out("o/simulation.json")));
    EXPECT_TRUE(j["truncated"].get<bool>());
}

TEST_F(CliTest, SimulateWithConstantRateReportsReference) {
    const auto cfg = write_config("s.cfg", "p = 0\nhorizon_T = 1\ndt = 0.01\nrecord_times = [0.5, 1]\nseed = 3\n");
    ASSERT_EQ(invoke({"simulate", "--config", cfg, "--out", out("o")}).code, kExitOk);
    const auto j = nlohmann::json::parse(io::read_file(out("o/simulation.json")));
    ASSERT_EQ(j["times"].size(), 2u);
    EXPECT_NEAR(j["times"][1]["population_reference"].get<double>(), std::exp(1.0), 1e-12);
}

TEST_F(CliTest, TubeOptionsAreValidated) {
    const auto cfg = write_config("t.cfg", "horizon_T = 1\ndt = 0.01\nseed = 1\ntube_path = spiral\ntube_epsilon = 0.1\n");
    EXPECT_EQ(invoke({"simulate", "--config", cfg, "--out", out("o")}).code, kExitUsage);
    const auto ok = write_config("ok.cfg", "horizon_T = 1\ndt = 0.01\nseed = 1\ntube_path = frontier\ntube_epsilon = 0.2\n");
    EXPECT_EQ(invoke({"simulate", "--config", ok, "--out", out("o")}).code, kExitOk);
}

TEST_F(CliTest, VerifyRejectsUnknownLevel) {
    const auto r = invoke({"verify", "--level", "medium"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("medium"), std::string::npos) << r.err;
}

TEST_F(CliTest, FigureWritesPathTable) {
    const auto cfg = write_config("f.cfg", "z = [0, 0.25]\nprofile_points = 5\n");
    ASSERT_EQ(invoke({"figure", "--config", cfg, "--out", out("o")}).code, kExitOk);
    const auto csv = io::read_file(out("o/figure_paths.csv"));
    EXPECT_NE(csv.find("s,r,g_0,g_0.25,h_0,h_0.25\n"), std::string::npos);
    EXPECT_TRUE(fs::exists(out("o/figure_profile_expected.csv")));
}

}  // namespace
}  // namespace bbm::cli
