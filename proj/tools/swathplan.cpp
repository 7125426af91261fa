// swathplan command-line driver.
//
//   swathplan plan --width W --rmin R --rlow A --rhigh B [--step S] [--out FILE]
//   swathplan simulate SPEC [--strategy predefined|adaptive] [--out DIR]
//   swathplan analyze GRID [--k K] [--margin M] [--bins N] [--seed S]
//   swathplan experiment SPEC [--out DIR]
//
// Exit codes: 0 success, 2 input error, 3 mission aborted.
// SWATHPLAN_OUTPUT_ROOT, when set, replaces the output directory of
// simulate/experiment runs with $SWATHPLAN_OUTPUT_ROOT/<experiment name>.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "swathplan/analysis.hpp"
#include "swathplan/experiment.hpp"
#include "swathplan/grid.hpp"
#include "swathplan/planner.hpp"
#include "swathplan/simulator.hpp"

namespace fs = std::filesystem;
using namespace swathplan;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kAborted = 3;

// Write to a sibling temp file, then rename over the target.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    body(os);
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path, 0);
  try {
    return parse_experiment(is);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

fs::path output_dir(const ExperimentSpec& spec, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* root = std::getenv("SWATHPLAN_OUTPUT_ROOT"); root && *root) return fs::path(root) / spec.name;
  if (!spec.output_dir.empty()) return spec.output_dir;
  return fs::path("out") / spec.name;
}

void write_history(std::ostream& os, const MissionResult& r) {
  os << "# r_adpt_history v1\n# after_track r_adpt_m\n";
  for (const auto& c : r.r_adpt_history) os << c.after_track << ' ' << c.r_adpt_m << '\n';
  os << "# r_eff estimates after each replanning step\n";
  for (double v : r.r_eff_history) os << "# r_eff " << v << '\n';
}

void write_mission(const fs::path& dir, const std::string& prefix, const MissionResult& r) {
  write_atomic(dir / (prefix + "_rr.csv"), [&](std::ostream& os) { write_rr_grid(os, r.grid); });
  write_atomic(dir / (prefix + "_looks.csv"), [&](std::ostream& os) { write_look_count_grid(os, r.grid); });
  write_atomic(dir / (prefix + "_plan.txt"), [&](std::ostream& os) { write_plan(os, r.plan); });
  write_atomic(dir / (prefix + "_history.txt"), [&](std::ostream& os) { write_history(os, r); });
  if (r.aborted) {
    write_atomic(dir / (prefix + "_ABORTED"), [&](std::ostream& os) { os << r.abort_reason << '\n'; });
  }
}

std::string history_string(const MissionResult& r) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < r.r_adpt_history.size(); ++i) os << (i ? ", " : "") << r.r_adpt_history[i].r_adpt_m;
  os << ']';
  return os.str();
}

int cmd_plan(double width, double r_min, double r_low, double r_high, double step, const std::string& out) {
  const auto interval = RangeInterval::bounded(r_min, r_low, r_high, step);
  const double r = polygon_adaptation(width, interval);
  const auto plan = layout_tracks(width, r, r_min, 0.0);
  fs::path path = out;
  if (path.empty()) {
    const char* root = std::getenv("SWATHPLAN_OUTPUT_ROOT");
    path = fs::path(root && *root ? root : ".") / "plan.txt";
  }
  write_atomic(path, [&](std::ostream& os) { write_plan(os, plan); });
  std::cout << "r_adpt " << r << "\ntracks " << plan.size() << "\nplan " << path.string() << '\n';
  return kOk;
}

int cmd_simulate(const std::string& spec_path, const std::string& strategy, const std::string& out) {
  const auto spec = load_spec(spec_path);
  const Strategy s = strategy == "predefined" ? Strategy::predefined : Strategy::adaptive;
  const auto result = run_mission(spec.mission(s));
  const auto dir = output_dir(spec, out);
  write_mission(dir, to_string(s), result);
  const auto cov = coverage_metrics(result, spec.perimeter_margin);
  std::cout << spec.name << ' ' << to_string(s) << ": tracks " << result.plan.size() << ", r_adpt history "
            << history_string(result) << ", uncovered " << cov.uncovered_fraction * 100.0 << " %\n";
  if (result.aborted) {
    std::cerr << "mission aborted: " << result.abort_reason << '\n';
    return kAborted;
  }
  return kOk;
}

int cmd_analyze(const std::string& grid_path, std::size_t k, std::size_t margin, std::size_t bins,
                std::uint64_t seed) {
  std::ifstream is(grid_path);
  if (!is) throw ParseError("cannot open " + grid_path, 0);
  RiskGrid grid;
  try {
    grid = read_rr_grid(is);
  } catch (const ParseError& e) {
    throw ParseError(grid_path + ": " + e.what(), 0);
  }
  const auto q = summarize_quality(grid, k, margin, seed);
  write_quality_report(std::cout, q, rr_histogram(grid, bins, margin));
  return kOk;
}

int cmd_experiment(const std::string& spec_path, const std::string& out) {
  const auto spec = load_spec(spec_path);
  const auto dir = output_dir(spec, out);
  const auto control = run_mission(spec.mission(Strategy::predefined));
  const auto adaptive = run_mission(spec.mission(Strategy::adaptive));
  write_mission(dir, "control", control);
  write_mission(dir, "adaptive", adaptive);
  if (control.aborted || adaptive.aborted) {
    std::cerr << spec.name << ": mission aborted: "
              << (control.aborted ? control.abort_reason : adaptive.abort_reason) << "\npartial artifacts in "
              << dir.string() << '\n';
    return kAborted;
  }
  const auto report = compare_missions(control, adaptive, spec.gmm_components, spec.perimeter_margin, spec.seed);
  write_atomic(dir / "report.txt", [&](std::ostream& os) { write_report_table(os, report); });
  write_atomic(dir / "report.kv", [&](std::ostream& os) { write_report_kv(os, report); });

  std::cout << spec.name << "  (r_planned " << spec.sensor.r_planned_m << ", r_true " << spec.sensor.r_true_m
            << ")\n";
  std::cout << "control  r_adpt " << history_string(control) << "\nadaptive r_adpt " << history_string(adaptive)
            << "\n\n";
  write_report_table(std::cout, report);
  std::cout << "\nartifacts in " << dir.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive track spacing planner and residual-risk survey simulator"};
  app.require_subcommand(1);

  double width = 0, r_min = 0, r_low = 0, r_high = 0, step = 1.0;
  std::string plan_out;
  auto* plan = app.add_subcommand("plan", "Choose r_adpt for a width and lay out the tracks");
  plan->add_option("--width", width, "Sweep-axis width (m)")->required();
  plan->add_option("--rmin", r_min, "Nadir half-gap (m)")->required();
  plan->add_option("--rlow", r_low, "Lower bound of candidate ranges (m)")->required();
  plan->add_option("--rhigh", r_high, "Upper bound of candidate ranges (m)")->required();
  plan->add_option("--step", step, "Range discretisation (m)");
  plan->add_option("--out", plan_out, "Plan file to write");

  std::string sim_spec, strategy = "adaptive", sim_out;
  auto* sim = app.add_subcommand("simulate", "Run one mission from an experiment file");
  sim->add_option("spec", sim_spec, "Experiment file")->required();
  sim->add_option("--strategy", strategy)->check(CLI::IsMember({"predefined", "adaptive"}));
  sim->add_option("--out", sim_out, "Output directory");

  std::string grid_path;
  std::size_t k = 2, margin = 1, bins = 50;
  std::uint64_t seed = 0;
  auto* analyze = app.add_subcommand("analyze", "Analyze an exported residual-risk grid");
  analyze->add_option("grid", grid_path, "rr_grid file")->required();
  analyze->add_option("--k", k, "Mixture components");
  analyze->add_option("--margin", margin, "Perimeter cells excluded");
  analyze->add_option("--bins", bins, "Histogram bins");
  analyze->add_option("--seed", seed, "EM initialisation seed");

  std::string exp_spec, exp_out;
  auto* experiment = app.add_subcommand("experiment", "Run control and adaptive missions and compare them");
  experiment->add_option("spec", exp_spec, "Experiment file")->required();
  experiment->add_option("--out", exp_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*plan) return cmd_plan(width, r_min, r_low, r_high, step, plan_out);
    if (*sim) return cmd_simulate(sim_spec, strategy, sim_out);
    if (*analyze) return cmd_analyze(grid_path, k, margin, bins, seed);
    if (*experiment) return cmd_experiment(exp_spec, exp_out);
  } catch (const NoAdmissibleRange& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAborted;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kInputError;
}
