#pragma once

// Mission execution over a gridded area. The simulator holds the truth (P_d
// curve and hard range limit); the planner only sees what it can estimate
// from noisy observations after each pair of tracks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swathplan/core.hpp"
#include "swathplan/grid.hpp"
#include "swathplan/pdmodel.hpp"
#include "swathplan/planner.hpp"
#include "swathplan/random.hpp"

namespace swathplan {

enum class Strategy { predefined, adaptive };

inline const char* to_string(Strategy s) { return s == Strategy::predefined ? "predefined" : "adaptive"; }

struct MissionConfig {
  SurveyArea area;
  SensorSpec sensor;
  Strategy strategy = Strategy::adaptive;
  PdCurve true_curve;
  double threshold = 0.05;
  double noise_sd = 0.02;
  std::uint64_t rng_seed = 0;
  bool pool_samples = false;  // fit on all samples so far instead of the last pair's
  double range_step_m = 1.0;
};

struct RangeChange {
  std::size_t after_track = 0;  // tracks executed before this range took effect
  double r_adpt_m = 0.0;
  bool operator==(const RangeChange&) const = default;
};

struct MissionSummary {
  std::size_t n_tracks = 0;
  double path_length_m = 0.0;
  std::size_t uncovered_cells = 0;
  double uncovered_fraction = 0.0;
  bool operator==(const MissionSummary&) const = default;
};

struct MissionResult {
  RiskGrid grid;
  TrackPlan plan;  // tracks as executed
  std::vector<RangeChange> r_adpt_history;
  std::vector<double> r_eff_history;  // one estimate per replanning step
  MissionSummary metrics;
  bool aborted = false;
  std::string abort_reason;

  std::vector<double> r_adpt_values() const {
    std::vector<double> out;
    for (const auto& c : r_adpt_history) out.push_back(c.r_adpt_m);
    return out;
  }
};

// Applies one pass: every cell whose centre sits at lateral range
// r_min <= y <= r_true from the track gets a look at P_d(y).
inline void ensonify(RiskGrid& grid, const Track& track, const PdCurve& true_curve, double r_min, double r_true) {
  for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
    const double y = std::abs(grid.center_x(ix) - track.x_m);
    if (y < r_min || y > r_true) continue;
    const double pd = true_curve(y);
    for (std::size_t iy = 0; iy < grid.ny(); ++iy) grid.add_look(ix, iy, y, pd);
  }
}

// One observation per whole metre of range in [r_min, r_true].
inline std::vector<PdSample> sample_pd_observations(const PdCurve& true_curve, double r_min, double r_true,
                                                    double noise_sd, Rng& rng) {
  if (noise_sd < 0.0) throw InvalidParams("noise sd must be non-negative");
  std::vector<PdSample> out;
  for (double y = std::ceil(r_min); y <= r_true; y += 1.0) {
    double pd = true_curve(y);
    if (noise_sd > 0.0) pd = std::clamp(pd + rng.normal(0.0, noise_sd), 0.0, 1.0);
    out.push_back({y, pd});
  }
  return out;
}

inline MissionSummary summarize(const RiskGrid& grid, std::size_t n_tracks, double length_m) {
  MissionSummary s;
  s.n_tracks = n_tracks;
  s.path_length_m = static_cast<double>(n_tracks) * length_m;
  s.uncovered_cells = static_cast<std::size_t>(
      std::count(grid.rr_values().begin(), grid.rr_values().end(), 1.0));
  s.uncovered_fraction = static_cast<double>(s.uncovered_cells) / static_cast<double>(grid.size());
  return s;
}

inline MissionResult run_mission(const MissionConfig& cfg) {
  const auto sensor = validate_sensor(cfg.sensor);
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw InvalidParams("threshold must be in (0,1)");
  const double width = cfg.area.width_m;
  const double r_min = sensor.r_min_m;
  const double r_true = sensor.r_true_m;

  MissionResult result;
  result.grid = RiskGrid(cfg.area);
  const Rng base(cfg.rng_seed);

  double r = sensor.r_planned_m;
  if (cfg.strategy == Strategy::adaptive) {
    r = polygon_adaptation(width, RangeInterval::from_upper(r_min, sensor.r_planned_m, cfg.range_step_m));
  }
  TrackPlan plan = layout_tracks(width, r, r_min, 0.0);
  result.r_adpt_history.push_back({0, r});

  std::vector<PdSample> samples;
  std::size_t next = 0;
  int pair_no = 0;
  while (next < plan.tracks.size()) {
    const bool pair = plan.tracks[next].paired() && next + 1 < plan.tracks.size();
    const std::size_t group = pair ? 2 : 1;
    if (!cfg.pool_samples) samples.clear();
    for (std::size_t j = 0; j < group; ++j) {
      Track t = plan.tracks[next + j];
      if (pair) t.pair_index = pair_no;
      ensonify(result.grid, t, cfg.true_curve, r_min, r_true);
      result.plan.tracks.push_back(t);
      Rng track_rng = base.split(result.plan.tracks.size());
      auto s = sample_pd_observations(cfg.true_curve, r_min, r_true, cfg.noise_sd, track_rng);
      samples.insert(samples.end(), s.begin(), s.end());
    }
    const Track& first = plan.tracks[next];
    result.plan.covered_up_to_m = pair ? first.x_m - first.r_used_m + pair_period(first.r_used_m, r_min)
                                       : plan.covered_up_to_m;
    next += group;
    if (pair) ++pair_no;
    if (result.plan.covered_up_to_m >= width - detail::kEps || next >= plan.tracks.size()) break;
    if (cfg.strategy != Strategy::adaptive) continue;

    try {
      const PdCurve estimate = fit_curve(samples, r_min, r_true);
      const double r_eff = effective_range(estimate, cfg.threshold);
      result.r_eff_history.push_back(r_eff);
      auto updated = replan(result.plan.covered_up_to_m, width, r_eff, r_min, pair_no, cfg.range_step_m);
      if (updated.r_adpt_m != r) result.r_adpt_history.push_back({result.plan.tracks.size(), updated.r_adpt_m});
      r = updated.r_adpt_m;
      plan = std::move(updated.plan);
      next = 0;
    } catch (const NoAdmissibleRange& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    } catch (const InsufficientData& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }
  }
  result.metrics = summarize(result.grid, result.plan.tracks.size(), cfg.area.length_m);
  return result;
}

}  // namespace swathplan
