#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "koopman_sp/cli.hpp"

using namespace koopman_sp;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "koopman_sp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "koopman_sp_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell_status(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(Cli, CycleReportsTableValues) {
  const Result r = run({"cycle", "--epsilon", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["period"].get<double>(), 6.66, 0.01);
  EXPECT_NEAR(j["omega"].get<double>(), 0.943, 0.002);
  EXPECT_NEAR(j["nu"].get<double>(), -1.06, 0.01);
  EXPECT_EQ(j["config"]["epsilon"], 1.0);
}

TEST(Cli, CycleToFile) {
  const fs::path dir = scratch("cycle");
  const Result r = run({"cycle", "--epsilon", "0.1", "--output", (dir / "c.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "c.json"));
  EXPECT_NEAR(j["period"].get<double>(), 2.87, 0.01);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"cycle", "--epsilon", "0"}).code, 2);
  EXPECT_EQ(run({"cycle", "--epsilon", "-1"}).code, 2);
  EXPECT_EQ(run({"cycle"}).code, 2);
  EXPECT_EQ(run({"cycle", "--epsilon", "abc"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"phase-grid", "--epsilon", "1", "--nx", "0"}).code, 2);
  EXPECT_EQ(run({"phase-grid", "--epsilon", "1", "--method", "magic"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "medium"}).code, 2);
  EXPECT_EQ(run({"cycle", "--epsilon", "1", "--config", "/nonexistent.cfg"}).code, 2);
  EXPECT_NE(run({"cycle", "--epsilon", "0"}).err.find("singular-grid"), std::string::npos);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Config, FileThenFlags) {
  cli::RunConfig c;
  cli::apply_config_text(c, "# comment\nepsilon = 0.1\nnx=11   # trailing\n\nmethod = fourier-average\n");
  EXPECT_EQ(c.epsilon, 0.1);
  EXPECT_EQ(c.grid.nx, 11u);
  EXPECT_EQ(c.method, "fourier-average");
  cli::set_value(c, "max-steps", "77");
  EXPECT_EQ(c.max_steps, 77);
  EXPECT_THROW(cli::apply_config_text(c, "nonsense\n"), cli::UsageError);
  EXPECT_THROW(cli::apply_config_text(c, "colour = red\n"), cli::UsageError);
  EXPECT_THROW(cli::set_value(c, "nx", "-3"), cli::UsageError);
  EXPECT_THROW(cli::set_value(c, "rtol", "1e-9x"), cli::UsageError);
}

TEST(Config, TextRoundTrip) {
  cli::RunConfig c;
  c.epsilon = 0.01;
  c.grid.nx = 9;
  c.rtol = 1.0 / 3.0;
  c.method = "fourier-average";
  cli::RunConfig d;
  cli::apply_config_text(d, cli::to_config_text(c));
  EXPECT_EQ(cli::to_json(c), cli::to_json(d));
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path dir = scratch("override");
  std::ofstream(dir / "run.cfg") << "epsilon = 0.1\n";
  const Result r = run({"cycle", "--config", (dir / "run.cfg").string(), "--epsilon", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["period"].get<double>(), 6.66, 0.01);
}

TEST(Cli, PhaseGridOutputsReproduceFromEchoedConfig) {
  const fs::path a = scratch("phase_a"), b = scratch("phase_b");
  const Result r = run({"phase-grid", "--epsilon", "1", "--nx", "9", "--ny", "5", "--out-dir", a.string(),
                        "--workers", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"phase.csv", "phase.csv.meta.json", "phase_angle.ppm", "phase_dx.csv", "phase_dx.ppm",
                        "phase_dy.csv", "phase_dy.ppm", "run.cfg"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  const auto side = nlohmann::json::parse(slurp(a / "phase.csv.meta.json"));
  EXPECT_EQ(side["config"]["nx"], 9);
  EXPECT_EQ(side["config"]["method"], "time-of-flight");
  EXPECT_NE(slurp(a / "phase_angle.ppm").find("# config {"), std::string::npos);

  const Result again = run({"phase-grid", "--config", (a / "run.cfg").string(), "--out-dir", b.string(),
                            "--workers", "3"});
  ASSERT_EQ(again.code, 0) << again.err;
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
}

TEST(Cli, IsostableGrid) {
  const fs::path dir = scratch("iso");
  const Result r = run({"isostable-grid", "--epsilon", "1", "--nx", "5", "--ny", "3", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"isostable_logabs.csv", "isostable_sign.csv", "isostable_logabs.ppm", "isostable_dx.ppm",
                        "isostable_dy.ppm"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const ScalarField sign = read_csv<double>(dir / "isostable_sign.csv");
  // the corner (4, 2) lies outside the cycle
  EXPECT_EQ(sign.at(4, 2), 1.0);
}

TEST(Cli, SingularGrid) {
  const fs::path dir = scratch("singular");
  const Result r = run({"singular-grid", "--nx", "5", "--ny", "5", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const ComplexField f = read_csv<std::complex<double>>(dir / "singular.csv");
  EXPECT_TRUE(f.is_sentinel(f.grid.index(2, 2)));
  EXPECT_LT(std::abs(f.at(4, 2) - singular_eigenfunction({4.0, 0.0})), 1e-15);
  EXPECT_TRUE(fs::exists(dir / "singular_angle.ppm"));
  EXPECT_TRUE(fs::exists(dir / "singular_re.ppm"));
}

TEST(Cli, WorkersFromEnvironment) {
  ::setenv("KOOPMAN_SP_WORKERS", "3", 1);
  EXPECT_EQ(default_workers(), 3u);
  ::setenv("KOOPMAN_SP_WORKERS", "junk", 1);
  EXPECT_GE(default_workers(), 1u);
  ::unsetenv("KOOPMAN_SP_WORKERS");
}

TEST(Cli, VerifyFastSuitePasses) {
  const Result r = run({"verify", "--suite", "fast"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("[SKIP] 7a"), std::string::npos);
  EXPECT_NE(r.out.find("0 failed"), std::string::npos);
}

TEST(Cli, BinaryExitCodes) {
  const std::string exe = KOOPMAN_SP_CLI;
  EXPECT_EQ(shell_status(exe + " cycle --epsilon 0 >/dev/null 2>&1"), 2);
  EXPECT_EQ(shell_status(exe + " cycle --epsilon 1 >/dev/null 2>&1"), 0);
  EXPECT_EQ(shell_status(exe + " >/dev/null 2>&1"), 2);
}
