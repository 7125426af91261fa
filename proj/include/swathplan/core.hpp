#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "swathplan/errors.hpp"

namespace swathplan {

// Rectangular survey box. Tracks run along length_m; spacing is planned along
// width_m (the sweep axis).
struct SurveyArea {
  double width_m = 0.0;
  double length_m = 0.0;
  double cell_size_m = 5.0;

  SurveyArea() = default;
  SurveyArea(double width, double length, double cell = 5.0)
      : width_m(width), length_m(length), cell_size_m(cell) {
    if (!(width > 0.0) || !(length > 0.0) || !(cell > 0.0)) {
      throw InvalidParams("survey area extents and cell size must be positive");
    }
  }

  // Cells per axis. Partial cells at the far edge are kept so the grid spans
  // the whole area (1212 m at 5 m -> 243 cells).
  std::size_t cells_x() const { return cells_for(width_m); }
  std::size_t cells_y() const { return cells_for(length_m); }

  bool operator==(const SurveyArea&) const = default;

 private:
  std::size_t cells_for(double extent) const {
    return static_cast<std::size_t>(std::ceil(extent / cell_size_m - 1e-9));
  }
};

// Side-looking sonar geometry. r_planned_m is what the operator assumes;
// r_true_m is the hard ensonification limit the simulator enforces.
struct SensorSpec {
  double r_min_m = 0.0;
  double r_planned_m = 0.0;
  double r_true_m = 0.0;

  bool operator==(const SensorSpec&) const = default;
};

// Paired tracks can fill each other's nadir gap only when r >= 3 * r_min.
inline bool pairing_feasible(double r, double r_min) { return r >= 3.0 * r_min; }

inline SensorSpec validate_sensor(const SensorSpec& spec) {
  if (!(spec.r_min_m > 0.0)) {
    throw InvalidParams("r_min must be positive");
  }
  if (!pairing_feasible(spec.r_planned_m, spec.r_min_m)) {
    throw InfeasiblePairing("planned range " + std::to_string(spec.r_planned_m) +
                            " m is below 3 x r_min = " + std::to_string(3.0 * spec.r_min_m) +
                            " m; paired tracks cannot cover the nadir gap");
  }
  if (spec.r_true_m < spec.r_min_m) {
    throw InvalidParams("true range must not be below r_min");
  }
  return spec;
}

struct Track {
  double x_m = 0.0;
  std::optional<int> pair_index;  // empty for an unpaired trailing track
  double r_used_m = 0.0;

  bool paired() const { return pair_index.has_value(); }
  bool operator==(const Track&) const = default;
};

struct TrackPlan {
  std::vector<Track> tracks;
  double covered_up_to_m = 0.0;

  std::size_t size() const { return tracks.size(); }
  bool empty() const { return tracks.empty(); }
  bool operator==(const TrackPlan&) const = default;
};

}  // namespace swathplan
