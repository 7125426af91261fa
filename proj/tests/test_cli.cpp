#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "swathplan/analysis.hpp"
#include "swathplan/grid.hpp"
#include "swathplan/planner.hpp"

namespace fs = std::filesystem;
using namespace swathplan;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with stdout captured and stderr appended to it.
Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" SWATHPLAN_CLI "\" " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const std::string& name) { return std::string(SWATHPLAN_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::map<std::string, double> read_kv(const fs::path& p) {
  std::map<std::string, double> kv;
  std::ifstream is(p);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    kv[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
  }
  return kv;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("swathplan_cli_") + info->name() + "_" + std::to_string(getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PlanOverestimate) {
  const auto r = cli("plan --width 1212 --rmin 40 --rlow 120 --rhigh 145 --out " + (dir_ / "p.txt").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("r_adpt 138\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("tracks 7\n"), std::string::npos) << r.out;
  std::ifstream is(dir_ / "p.txt");
  EXPECT_EQ(read_plan(is).tracks, layout_tracks(1212.0, 138.0, 40.0, 0.0).tracks);
}

TEST_F(Cli, PlanAtPairingLimit) {
  const auto r = cli("plan --width 1212 --rmin 40 --rlow 120 --rhigh 120 --out " + (dir_ / "p.txt").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("r_adpt 120\n"), std::string::npos);
  EXPECT_NE(r.out.find("tracks 8\n"), std::string::npos);
}

TEST_F(Cli, PlanRejectsInfeasibleInterval) {
  const auto r = cli("plan --width 100 --rmin 40 --rlow 100 --rhigh 110 --out " + (dir_ / "p.txt").string());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_FALSE(fs::exists(dir_ / "p.txt"));
}

TEST_F(Cli, MissingArgumentsAreUsageErrors) {
  EXPECT_EQ(cli("plan --width 100").code, 2);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("simulate " + config("experiment1.ini") + " --strategy sideways").code, 2);
}

TEST_F(Cli, ExperimentOverestimate) {
  const auto r = cli("experiment " + config("experiment1.ini") + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("adaptive r_adpt [138, 120]"), std::string::npos) << r.out;
  const auto history = slurp(dir_ / "adaptive_history.txt");
  EXPECT_NE(history.find("0 138\n2 120\n"), std::string::npos) << history;
  for (const char* f : {"control_rr.csv", "control_looks.csv", "control_plan.txt", "adaptive_rr.csv", "report.txt",
                        "report.kv"})
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  const auto kv = read_kv(dir_ / "report.kv");
  EXPECT_EQ(kv.at("control.n_tracks"), 7.0);
  EXPECT_EQ(kv.at("adaptive.n_tracks"), 8.0);
  EXPECT_LT(kv.at("adaptive.uncovered_fraction"), kv.at("control.uncovered_fraction"));
}

TEST_F(Cli, ExperimentUnderestimateKeepsPlan) {
  ASSERT_EQ(cli("experiment " + config("experiment2.ini") + " --out " + dir_.string()).code, 0);
  std::ifstream c(dir_ / "control_plan.txt"), a(dir_ / "adaptive_plan.txt");
  const auto pc = read_plan(c), pa = read_plan(a);
  ASSERT_EQ(pc.size(), pa.size());
  for (std::size_t i = 0; i < pc.size(); ++i) EXPECT_EQ(pc.tracks[i].x_m, pa.tracks[i].x_m);
}

TEST_F(Cli, ExperimentUsualRangeReport) {
  ASSERT_EQ(cli("experiment " + config("experiment3.ini") + " --out " + dir_.string()).code, 0);
  const auto kv = read_kv(dir_ / "report.kv");
  EXPECT_LT(kv.at("adaptive.rc_mean"), kv.at("control.rc_mean"));
  EXPECT_EQ(kv.at("delta.rc_mean"), kv.at("adaptive.rc_mean") - kv.at("control.rc_mean"));
}

TEST_F(Cli, SimulateSingleStrategy) {
  const auto r = cli("simulate " + config("experiment1.ini") + " --strategy predefined --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "predefined_rr.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "adaptive_rr.csv"));
}

TEST_F(Cli, AbortedMissionExitCodeAndMarker) {
  std::ofstream(dir_ / "collapse.ini") << "name = collapse\n[sensor]\nr_planned = 130\nr_true = 100\n";
  const auto r = cli("simulate " + (dir_ / "collapse.ini").string() + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "o" / "adaptive_ABORTED"));
  EXPECT_TRUE(fs::exists(dir_ / "o" / "adaptive_rr.csv"));
}

TEST_F(Cli, AnalyzeUniformGrid) {
  RiskGrid g(20, 10, 5.0);
  for (std::size_t iy = 0; iy < 10; ++iy)
    for (std::size_t ix = 0; ix < 20; ++ix) g.set_rr(ix, iy, 0.7);
  std::ofstream(dir_ / "g.csv") << [&] {
    std::ostringstream os;
    write_rr_grid(os, g);
    return os.str();
  }();
  const auto r = cli("analyze " + (dir_ / "g.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("rc.mean=0.69999999999999996\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("coverage.uncovered_cells=0\n"), std::string::npos);
}

TEST_F(Cli, AnalyzeMatchesLibraryBitForBit) {
  ASSERT_EQ(cli("experiment " + config("experiment3.ini") + " --out " + dir_.string()).code, 0);
  const auto r = cli("analyze " + (dir_ / "adaptive_rr.csv").string() + " --k 2 --margin 1 --bins 50 --seed 4");
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream is(dir_ / "adaptive_rr.csv");
  const auto grid = read_rr_grid(is);
  std::ostringstream expect;
  write_quality_report(expect, summarize_quality(grid, 2, 1, 4), rr_histogram(grid, 50, 1));
  EXPECT_EQ(r.out, expect.str());
}

TEST_F(Cli, AnalyzeRejectsBadInput) {
  std::ofstream(dir_ / "empty.csv").close();
  EXPECT_EQ(cli("analyze " + (dir_ / "empty.csv").string()).code, 2);

  std::ofstream(dir_ / "bad.csv") << "# rr_grid v1 nx=2 ny=2 cell=5\n0.5,0.5\n0.5,zz\n";
  const auto r = cli("analyze " + (dir_ / "bad.csv").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;

  RiskGrid untouched(4, 4, 5.0);
  std::ofstream os(dir_ / "blank.csv");
  write_rr_grid(os, untouched);
  os.close();
  EXPECT_EQ(cli("analyze " + (dir_ / "blank.csv").string() + " --margin 0").code, 2);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  ASSERT_EQ(cli("experiment " + config("experiment1.ini") + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(cli("experiment " + config("experiment1.ini") + " --out " + (dir_ / "b").string()).code, 0);
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path().filename();
  }
}

TEST_F(Cli, OutputRootFromEnvironment) {
  const auto r = cli("experiment " + config("experiment2.ini"), "SWATHPLAN_OUTPUT_ROOT=" + dir_.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "experiment2" / "report.kv"));
}

TEST_F(Cli, MalformedSpecReportsLine) {
  std::ofstream(dir_ / "bad.ini") << "[area]\nwidth = 100\nbreadth = 4\n";
  const auto r = cli("experiment " + (dir_ / "bad.ini").string() + " --out " + dir_.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;
}
