#include "patchide/cli.hpp"
#include "patchide/config.hpp"
#include "patchide/errors.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace patchide {
namespace {

namespace fs = std::filesystem;

const std::string scenario_dir = PATCHIDE_SCENARIO_DIR;
const std::string data_dir = PATCHIDE_TEST_DATA_DIR;

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::path(PATCHIDE_WORK_DIR) / "cli" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(PATCHIDE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

nlohmann::json run_json(Command cmd, const std::string& scenario, const std::string& tag, int& code) {
  const auto dir = work_dir(tag);
  std::ostringstream out, err;
  code = run_command(cmd, load_config(scenario), RunFlags{dir.string(), true}, out, err);
  return nlohmann::json::parse(slurp(dir / "summary.json"));
}

TEST(ParseCommand, Names) {
  EXPECT_EQ(parse_command("simulate"), Command::Simulate);
  EXPECT_EQ(parse_command("verify"), Command::Verify);
  EXPECT_FALSE(parse_command("plot").has_value());
}

TEST(Cli, EigenTwoPatch) {
  int code = -1;
  const auto s = run_json(Command::Eigen, scenario_dir + "/two_patch_persistence.yaml", "eigen", code);
  EXPECT_EQ(code, exit_ok);
  EXPECT_NEAR(s["eigen"]["lambda0"].get<double>(), 1.6, 1.6e-10);
  EXPECT_TRUE(s["spectral_lower_bound"]["satisfied"].get<bool>());
  EXPECT_EQ(s["regime"], "Persistence");
  EXPECT_TRUE(s.contains("scenario"));
  EXPECT_EQ(s["config_hash"].get<std::string>().size(), 16u);
}

TEST(Cli, SimulateRankOne) {
  int code = -1;
  const auto s = run_json(Command::Simulate, scenario_dir + "/rank_one.yaml", "simulate_rank_one", code);
  EXPECT_EQ(code, exit_ok);
  EXPECT_EQ(s["regime"], "Persistence");
  EXPECT_NEAR(s["stationary"]["stationary_min"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(s["stationary"]["stationary_max"].get<double>(), 1.0, 1e-9);
}

TEST(Cli, PersistenceProfileIsPointSix) {
  const auto dir = work_dir("profile");
  std::ostringstream out, err;
  ASSERT_EQ(run_command(Command::Simulate, load_config(scenario_dir + "/two_patch_persistence.yaml"),
                        RunFlags{dir.string(), true}, out, err),
            exit_ok);
  std::istringstream csv(slurp(dir / "profile.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,w,patch_index");
  int rows = 0;
  std::set<int> patches;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    EXPECT_NEAR(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), 0.6, 1e-8) << line;
    patches.insert(std::stoi(line.substr(c2 + 1)));
    ++rows;
  }
  EXPECT_EQ(rows, 2 * 4 * 4);
  EXPECT_EQ(patches.size(), 2u);
}

TEST(Cli, ExtinctionNormHistoryStrictlyDecreasing) {
  const auto dir = work_dir("extinction");
  std::ostringstream out, err;
  ASSERT_EQ(run_command(Command::Simulate, load_config(scenario_dir + "/two_patch_extinction.yaml"),
                        RunFlags{dir.string(), true}, out, err),
            exit_ok);
  std::istringstream csv(slurp(dir / "norms.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n,sup_diff,l2_diff");
  double prev = std::numeric_limits<double>::infinity();
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double d = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    EXPECT_LT(d, prev) << line;
    prev = d;
    ++rows;
  }
  EXPECT_GT(rows, 10);
}

TEST(Cli, VerifyMisdeclaredDeltaExitsFour) {
  int code = -1;
  const auto s = run_json(Command::Verify, data_dir + "/misdeclared_delta.yaml", "verify_bad", code);
  EXPECT_EQ(code, exit_invariant_violation);
  EXPECT_FALSE(s["all_passed"].get<bool>());
  bool found = false;
  for (const auto& c : s["checks"]) {
    if (c["name"] == "kernel_lower_bound") {
      found = true;
      EXPECT_FALSE(c["passed"].get<bool>());
      EXPECT_NE(c["detail"].get<std::string>().find("k=0.6"), std::string::npos);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(run_binary("verify --quiet --config " + data_dir + "/misdeclared_delta.yaml --out " +
                       work_dir("verify_bad_bin").string()),
            4);
}

TEST(Cli, VerifyPassesOnEveryShippedScenario) {
  for (const auto& entry : fs::directory_iterator(scenario_dir)) {
    if (entry.path().extension() != ".yaml") continue;
    int code = -1;
    const auto s = run_json(Command::Verify, entry.path().string(), "verify_" + entry.path().stem().string(), code);
    EXPECT_EQ(code, exit_ok) << entry.path() << "\n" << s["checks"].dump(2);
  }
}

TEST(Cli, ThresholdOnEveryShippedSweep) {
  for (const auto& entry : fs::directory_iterator(scenario_dir)) {
    if (entry.path().extension() != ".yaml") continue;
    int code = -1;
    const auto s = run_json(Command::Threshold, entry.path().string(), "threshold_" + entry.path().stem().string(), code);
    EXPECT_EQ(code, exit_ok) << entry.path();
    EXPECT_TRUE(s.contains("critical_r0"));
  }
}

TEST(Cli, ThresholdR0PhaseTable) {
  const auto dir = work_dir("threshold_r0");
  std::ostringstream out, err;
  ASSERT_EQ(run_command(Command::Threshold, load_config(scenario_dir + "/threshold_r0.yaml"),
                        RunFlags{dir.string(), true}, out, err),
            exit_ok);
  const auto phase = slurp(dir / "phase.csv");
  EXPECT_EQ(phase.rfind("r0,lambda0,regime\n", 0), 0u);
  EXPECT_NE(phase.find("# crossing r0 = 1.25"), std::string::npos) << phase;
  EXPECT_EQ(phase.find('\r'), std::string::npos);
}

TEST(Cli, ByteIdenticalReruns) {
  for (const char* name : {"two_patch_persistence", "two_patch_influx", "exponential_patchy"}) {
    const auto dir = work_dir(std::string("rerun_") + name);
    const std::string args = "simulate --quiet --config " + scenario_dir + "/" + name + ".yaml --out " + dir.string();
    ASSERT_EQ(run_binary(args), 0);
    const auto first = snapshot(dir);
    EXPECT_GE(first.size(), 4u);
    ASSERT_EQ(run_binary(args), 0);
    EXPECT_EQ(first, snapshot(dir)) << name;
  }
}

TEST(Cli, ArtifactsIndependentOfOutputDirectory) {
  auto cfg = load_config(scenario_dir + "/two_patch_persistence.yaml");
  int status = 0;
  const auto a = build_artifacts(Command::Simulate, cfg, status);
  cfg.output.directory = "elsewhere";
  const auto b = build_artifacts(Command::Simulate, cfg, status);
  EXPECT_EQ(a.tables, b.tables);
  auto sa = a.summary;
  auto sb = b.summary;
  sa.erase("scenario");
  sb.erase("scenario");
  sa.erase("config_hash");
  sb.erase("config_hash");
  EXPECT_EQ(sa.dump(), sb.dump());
}

TEST(Cli, EchoedConfigReloads) {
  const auto dir = work_dir("echo");
  std::ostringstream out, err;
  auto cfg = load_config(scenario_dir + "/exponential_patchy.yaml");
  ASSERT_EQ(run_command(Command::Eigen, cfg, RunFlags{dir.string(), true}, out, err), exit_ok);
  cfg.output.directory = dir.string();
  EXPECT_EQ(load_config((dir / "config.effective.yaml").string()), cfg);
}

TEST(Cli, FormatsSelectOutputs) {
  const auto dir = work_dir("formats");
  auto cfg = load_config(scenario_dir + "/rank_one.yaml");
  cfg.output.formats = {"csv"};
  std::ostringstream out, err;
  ASSERT_EQ(run_command(Command::Eigen, cfg, RunFlags{dir.string(), true}, out, err), exit_ok);
  EXPECT_FALSE(fs::exists(dir / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "eigenfunction.csv"));
  EXPECT_TRUE(fs::exists(dir / "config.effective.yaml"));
}

TEST(Cli, ExitCodes) {
  const std::string out = " --out " + work_dir("codes").string();
  EXPECT_EQ(run_binary("eigen --quiet --config " + scenario_dir + "/rank_one.yaml" + out), 0);
  EXPECT_EQ(run_binary("eigen --config " + data_dir + "/does_not_exist.yaml" + out), 2);
  EXPECT_EQ(run_binary("plot --config " + scenario_dir + "/rank_one.yaml" + out), 2);
  EXPECT_EQ(run_binary("eigen" + out), 2);
  EXPECT_EQ(run_binary("--version"), 0);
}

TEST(Cli, NoConvergenceMapsToThree) {
  auto cfg = load_config(scenario_dir + "/two_patch_persistence.yaml");
  cfg.tolerances.max_generations = 5;
  std::ostringstream out, err;
  EXPECT_EQ(run_command(Command::Simulate, cfg, RunFlags{work_dir("noconv").string(), true}, out, err),
            exit_no_convergence);
  EXPECT_NE(err.str().find("numerical failure"), std::string::npos);
}

TEST(Cli, SummaryLineUnlessQuiet) {
  std::ostringstream out, err;
  ASSERT_EQ(run_command(Command::Eigen, load_config(scenario_dir + "/rank_one.yaml"),
                        RunFlags{work_dir("loud").string(), false}, out, err),
            exit_ok);
  EXPECT_NE(out.str().find("eigen: rank_one, lambda0 = "), std::string::npos) << out.str();
}

}  // namespace
}  // namespace patchide
