#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "finslerkit/errors.hpp"
#include "finslerkit/runner.hpp"

namespace finslerkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("finslerkit_runner_" + std::string(::testing::UnitTest::GetInstance()
                                                   ->current_test_info()
                                                   ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

const char* const kFunkPass = R"({
  "metric": "funk",
  "dimension": 2,
  "sampling": {"count": 500, "seed": 7},
  "checks": ["symmetry", "rapcsak", {"name": "curvature", "params": {"lambda": -0.25}}]
})";

const char* const kFunkWrongLambda = R"({
  "metric": "funk",
  "dimension": 2,
  "sampling": {"count": 500, "seed": 7},
  "checks": ["symmetry", "rapcsak", {"name": "curvature", "params": {"lambda": 0}}]
})";

int run_text(const std::string& path, std::string& out, std::string& err, bool as_json = true) {
  CliOverrides o;
  o.json = as_json;
  return run_config(path, o, out, err);
}

TEST_F(RunnerTest, FunkWithCorrectLambdaPasses) {
  std::string out, err;
  EXPECT_EQ(run_text(write("c.json", kFunkPass), out, err), kExitPass) << err;
  const json report = json::parse(out);
  EXPECT_TRUE(report["pass"].get<bool>());
  ASSERT_EQ(report["records"].size(), 3u);
  for (const auto& rec : report["records"]) {
    EXPECT_TRUE(rec["pass"].get<bool>()) << rec["check"];
    EXPECT_EQ(rec["samples"], 500);
    EXPECT_LE(rec["max_residual"].get<double>(), rec["tolerance"].get<double>());
  }
  EXPECT_EQ(report["records"][2]["check"], "curvature");
}

TEST_F(RunnerTest, WrongLambdaFailsWithWorstPoint) {
  std::string out, err;
  EXPECT_EQ(run_text(write("c.json", kFunkWrongLambda), out, err), kExitCheckFailed);
  const json report = json::parse(out);
  EXPECT_FALSE(report["pass"].get<bool>());
  const json& curvature = report["records"][2];
  EXPECT_FALSE(curvature["pass"].get<bool>());
  EXPECT_GT(curvature["max_residual"].get<double>(), 1e-3);
  ASSERT_TRUE(curvature["worst_point"].is_object());
  EXPECT_EQ(curvature["worst_point"]["x"].size(), 2u);
  EXPECT_EQ(curvature["worst_point"]["y"].size(), 2u);
  EXPECT_NEAR(curvature["details"]["lambda_estimate"].get<double>(), -0.25, 1e-9);
}

TEST_F(RunnerTest, JsonKeyOrderIsFixed) {
  std::string out, err;
  run_text(write("c.json", kFunkPass), out, err);
  const std::array<const char*, 6> top = {"\"metric\"", "\"dimension\"", "\"seed\"",
                                          "\"samples\"", "\"records\"", "\"pass\": "};
  std::size_t at = 0;
  for (const char* key : top) {
    const std::size_t next = out.find(key, at);
    ASSERT_NE(next, std::string::npos) << key;
    at = next;
  }
  const std::array<const char*, 8> rec = {"\"check\"", "\"metric\"", "\"samples\"",
                                          "\"max_residual\"", "\"tolerance\"",
                                          "\"worst_point\"", "\"pass\"", "\"details\""};
  at = out.find("\"records\"");
  for (const char* key : rec) {
    const std::size_t next = out.find(key, at);
    ASSERT_NE(next, std::string::npos) << key;
    at = next;
  }
}

TEST_F(RunnerTest, DoublesRoundTrip) {
  std::string out, err;
  run_text(write("c.json", kFunkPass), out, err);
  const json report = json::parse(out);
  const double r = report["records"][0]["max_residual"].get<double>();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", r);
  EXPECT_NE(out.find(buf), std::string::npos);
}

TEST_F(RunnerTest, ByteIdenticalAcrossRuns) {
  const std::string path = write("c.json", kFunkPass);
  std::string a, b, err;
  run_text(path, a, err);
  run_text(path, b, err);
  EXPECT_EQ(a, b);
  std::string ta, tb;
  run_text(path, ta, err, false);
  run_text(path, tb, err, false);
  EXPECT_EQ(ta, tb);
}

TEST_F(RunnerTest, MisspelledMetricSuggestsName) {
  std::string out, err;
  const std::string path = write("c.json", R"({"metric": "fnuk", "checks": ["symmetry"]})");
  EXPECT_EQ(run_text(path, out, err), kExitConfigError);
  EXPECT_NE(err.find("funk"), std::string::npos) << err;
  EXPECT_TRUE(out.empty());
}

TEST_F(RunnerTest, MisspelledCheckSuggestsName) {
  std::string out, err;
  const std::string path = write("c.json", R"({"metric": "funk", "checks": ["rapcsk"]})");
  EXPECT_EQ(run_text(path, out, err), kExitConfigError);
  EXPECT_NE(err.find("'rapcsak'"), std::string::npos) << err;
}

TEST_F(RunnerTest, MisspelledKeySuggestsName) {
  std::string out, err;
  const std::string path =
      write("c.json", R"({"metric": "funk", "dimenson": 3, "checks": ["symmetry"]})");
  EXPECT_EQ(run_text(path, out, err), kExitConfigError);
  EXPECT_NE(err.find("'dimension'"), std::string::npos) << err;
}

TEST_F(RunnerTest, ExpressionErrorReportsOffset) {
  std::string out, err;
  const std::string path = write(
      "c.json", R"j({"metric": {"name": "p", "phi": "u*(1+r^2"}, "checks": ["homogeneity"]})j");
  EXPECT_EQ(run_text(path, out, err), kExitConfigError);
  EXPECT_NE(err.find("offset"), std::string::npos) << err;
}

TEST_F(RunnerTest, MissingFileAndBadJsonAreConfigErrors) {
  std::string out, err;
  EXPECT_EQ(run_text((dir_ / "absent.json").string(), out, err), kExitConfigError);
  EXPECT_EQ(run_text(write("c.json", "{ not json"), out, err), kExitConfigError);
  EXPECT_EQ(run_text(write("d.json", R"({"metric": "funk", "checks": []})"), out, err),
            kExitConfigError);
  EXPECT_EQ(run_text(write("e.json",
                           R"({"metric": "funk", "dimension": 5, "checks": ["symmetry"]})"),
                     out, err),
            kExitConfigError);
  EXPECT_EQ(run_text(write("f.json", R"({"metric": "funk", "sampling": {"count": 0},
                                         "checks": ["symmetry"]})"),
                     out, err),
            kExitConfigError);
}

TEST_F(RunnerTest, SphericalOnlyCheckOnGeneralMetricIsConfigError) {
  std::string out, err;
  const std::string path = write("c.json", R"j({
    "metric": {"name": "e", "general": {"F": "sqrt(y1^2 + y2^2)"}},
    "checks": ["curvature"]})j");
  EXPECT_EQ(run_text(path, out, err), kExitConfigError);
  EXPECT_NE(err.find("spherically symmetric"), std::string::npos) << err;
}

TEST_F(RunnerTest, OverridesApply) {
  const std::string path = write("c.json", kFunkPass);
  CliOverrides o;
  o.json = true;
  o.samples = 20;
  o.seed = 3;
  std::string out, err;
  EXPECT_EQ(run_config(path, o, out, err), kExitPass);
  const json report = json::parse(out);
  EXPECT_EQ(report["samples"], 20);
  EXPECT_EQ(report["seed"], 3);
  o.samples = 0;
  EXPECT_EQ(run_config(path, o, out, err), kExitConfigError);
}

TEST_F(RunnerTest, GeodesicDumpWritesCsv) {
  const std::string path = write("c.json", R"({
    "metric": "funk", "sampling": {"count": 5, "seed": 1},
    "checks": [{"name": "geodesics", "params": {"count": 3, "steps": 50}}]})");
  CliOverrides o;
  o.dump_geodesics_dir = (dir_ / "dump").string();
  fs::create_directories(dir_ / "dump");
  std::string out, err;
  EXPECT_EQ(run_config(path, o, out, err), kExitPass) << err << out;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "dump")) {
    ++files;
    std::ifstream in(entry.path());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header.rfind("t,", 0), 0u) << header;
  }
  EXPECT_EQ(files, 3);
}

TEST(Runner, ParseConfigDefaults) {
  const RunConfig cfg = parse_config(R"({"metric": "klein", "checks": ["symmetry"]})");
  EXPECT_EQ(cfg.dimension, 2);
  EXPECT_EQ(cfg.count, 500);
  EXPECT_EQ(cfg.seed, 0u);
  ASSERT_EQ(cfg.checks.size(), 1u);
  EXPECT_EQ(default_tolerance("symmetry"), 1e-9);
  EXPECT_EQ(default_tolerance("curvature"), 1e-8);
}

struct ShippedConfig {
  const char* file;
  int exit_code;
};

class ShippedConfigTest : public ::testing::TestWithParam<ShippedConfig> {};

TEST_P(ShippedConfigTest, ExitCode) {
  std::string out, err;
  const std::string path = std::string(FINSLERKIT_TEST_CONFIGS) + "/" + GetParam().file;
  EXPECT_EQ(run_text(path, out, err), GetParam().exit_code) << err << out;
}

// bryant_steep: curvature holds but g is indefinite on part of the box.
INSTANTIATE_TEST_SUITE_P(Configs, ShippedConfigTest,
                         ::testing::Values(ShippedConfig{"funk.json", kExitPass},
                                           ShippedConfig{"klein.json", kExitPass},
                                           ShippedConfig{"family_funk.json", kExitPass},
                                           ShippedConfig{"bryant_steep.json", kExitCheckFailed},
                                           ShippedConfig{"non_projective.json", kExitCheckFailed},
                                           ShippedConfig{"anisotropic.json", kExitCheckFailed}));

TEST(Runner, SteepBryantFailsOnlyConvexity) {
  std::string out, err;
  run_text(std::string(FINSLERKIT_TEST_CONFIGS) + "/bryant_steep.json", out, err);
  const json report = json::parse(out);
  EXPECT_TRUE(report["records"][0]["pass"].get<bool>());
  EXPECT_EQ(report["records"][1]["check"], "convexity");
  EXPECT_FALSE(report["records"][1]["pass"].get<bool>());
}

struct Process {
  int status;
  std::string out;
};

Process run_verify(const std::string& args) {
  const std::string cmd = std::string(FINSLERKIT_VERIFY_EXE) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  Process p{-1, {}};
  if (!pipe) return p;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) p.out.append(buf.data(), got);
  const int raw = pclose(pipe);
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return p;
}

TEST_F(RunnerTest, VerifyExecutableExitCodes) {
  EXPECT_EQ(run_verify(write("a.json", kFunkPass)).status, 0);
  EXPECT_EQ(run_verify(write("b.json", kFunkWrongLambda)).status, 1);
  EXPECT_EQ(run_verify(write("c.json", R"({"metric": "fnuk", "checks": ["symmetry"]})")).status,
            2);
  EXPECT_EQ(run_verify("--no-such-flag").status, 2);
  EXPECT_EQ(run_verify(write("d.json", kFunkPass) + " --samples 0").status, 2);
}

TEST_F(RunnerTest, VerifyExecutableJsonIsByteIdentical) {
  const std::string path = write("a.json", kFunkPass);
  const Process a = run_verify(path + " --json --seed 7");
  const Process b = run_verify(path + " --json --seed 7");
  EXPECT_EQ(a.status, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  json parsed;
  EXPECT_NO_THROW(parsed = json::parse(a.out));
}

}  // namespace
}  // namespace finslerkit
