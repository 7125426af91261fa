#pragma once

// Paired-track layout, track counting, and range selection for adaptive
// track spacing.
//
// Geometry of one pair with range r and nadir half-gap r_min, first track at x:
//   second track at x + (r - r_min): its outer port edge meets the first
//   track's inner port edge, and each track's swath fills the other's nadir.
//   The pair spans [x - r, x + 2r - r_min], i.e. 3r - r_min of sweep axis.
// Consecutive pairs abut outer edge to outer edge, so overlap from any range
// surplus (true range above r) lands at the tail of both swaths.

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "swathplan/core.hpp"
#include "swathplan/errors.hpp"

namespace swathplan {

namespace detail {
constexpr double kEps = 1e-9;

inline void require_pairing(double r, double r_min) {
  if (!(r_min > 0.0)) throw InvalidParams("r_min must be positive");
  if (!pairing_feasible(r, r_min)) {
    throw InfeasiblePairing("range " + std::to_string(r) + " m < 3 x r_min (" +
                            std::to_string(3.0 * r_min) + " m)");
  }
}
}  // namespace detail

// Candidate ranges {a, a + step, ..., <= b}. The planner's own intervals pin
// a at 3 * r_min; bounded() admits a tighter operator-chosen lower bound.
struct RangeInterval {
  double a_m = 0.0;
  double b_m = 0.0;
  double step_m = 1.0;
  double r_min_m = 0.0;

  static RangeInterval from_upper(double r_min, double upper, double step = 1.0) {
    if (!(r_min > 0.0)) throw InvalidParams("r_min must be positive");
    if (!(step > 0.0)) throw InvalidParams("range step must be positive");
    if (upper < 3.0 * r_min) {
      throw InfeasiblePairing("upper range " + std::to_string(upper) + " m < 3 x r_min (" +
                              std::to_string(3.0 * r_min) + " m)");
    }
    return {3.0 * r_min, upper, step, r_min};
  }

  static RangeInterval bounded(double r_min, double lower, double upper, double step = 1.0) {
    auto out = from_upper(r_min, upper, step);
    if (lower < out.a_m) {
      throw InfeasiblePairing("lower range " + std::to_string(lower) + " m < 3 x r_min (" +
                              std::to_string(out.a_m) + " m)");
    }
    if (lower > upper) throw InvalidParams("range interval lower bound exceeds upper bound");
    out.a_m = lower;
    return out;
  }

  double r_min() const { return r_min_m; }

  std::vector<double> candidates() const {
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
      const double r = a_m + static_cast<double>(i) * step_m;
      if (r > b_m + detail::kEps) break;
      out.push_back(r);
    }
    return out;
  }
};

inline double pair_period(double r, double r_min) {
  detail::require_pairing(r, r_min);
  return 3.0 * r - r_min;
}

// Whole pairs first; a residual strip no wider than one side swath
// (r - r_min) gets a single track, anything wider another pair.
inline int tracks_needed(double width, double r, double r_min) {
  if (!(width > 0.0)) throw InvalidParams("width must be positive");
  const double period = pair_period(r, r_min);
  const double n_full = std::floor(width / period + detail::kEps);
  const double residual = width - n_full * period;
  const int base = 2 * static_cast<int>(n_full);
  if (residual <= detail::kEps) return base;
  if (residual <= r - r_min + detail::kEps) return base + 1;
  return base + 2;
}

// Smallest candidate range attaining the minimum track count.
inline double polygon_adaptation(double width, const RangeInterval& interval) {
  if (!(interval.a_m <= interval.b_m)) throw InvalidParams("empty range interval");
  const double r_min = interval.r_min();
  double best_r = interval.a_m;
  int best_n = tracks_needed(width, best_r, r_min);
  for (double r : interval.candidates()) {
    const int n = tracks_needed(width, r, r_min);
    if (n < best_n) {
      best_n = n;
      best_r = r;
    }
  }
  return best_r;
}

inline TrackPlan layout_tracks(double width, double r, double r_min, double origin,
                               int first_pair_index = 0) {
  if (!(width > 0.0)) throw InvalidParams("cannot lay out tracks over a non-positive width");
  const int n = tracks_needed(width, r, r_min);
  const double period = 3.0 * r - r_min;
  TrackPlan plan;
  const int pairs = n / 2;
  for (int k = 0; k < pairs; ++k) {
    const double x1 = origin + k * period + r;
    plan.tracks.push_back({x1, first_pair_index + k, r});
    plan.tracks.push_back({x1 + (r - r_min), first_pair_index + k, r});
  }
  plan.covered_up_to_m = origin + pairs * period;
  if (n % 2 == 1) {
    // Sits where the next pair's first track would: its inner (port) swath
    // covers the residual strip, its nadir falls outside the area.
    const double start = plan.covered_up_to_m;
    plan.tracks.push_back({start + r, std::nullopt, r});
    plan.covered_up_to_m = start + (r - r_min);
  }
  return plan;
}

struct Replan {
  double r_adpt_m = 0.0;
  TrackPlan plan;
};

inline Replan replan(double covered_up_to, double total_width, double new_r_eff, double r_min,
                     int first_pair_index = 0, double step = 1.0) {
  if (!(covered_up_to < total_width)) throw InvalidParams("nothing left to cover");
  if (new_r_eff < 3.0 * r_min) {
    throw NoAdmissibleRange("effective range " + std::to_string(new_r_eff) +
                            " m fell below the pairing limit " + std::to_string(3.0 * r_min) + " m");
  }
  const double remaining = total_width - covered_up_to;
  const double r = polygon_adaptation(remaining, RangeInterval::from_upper(r_min, new_r_eff, step));
  return {r, layout_tracks(remaining, r, r_min, covered_up_to, first_pair_index)};
}

// Planned swath intervals [x - r, x - r_min] and [x + r_min, x + r] of every
// track, using each track's r_used unless an override range is given.
inline std::vector<std::pair<double, double>> swath_intervals(const TrackPlan& plan, double r_min,
                                                              double range_override = -1.0) {
  std::vector<std::pair<double, double>> out;
  for (const auto& t : plan.tracks) {
    const double r = range_override > 0.0 ? range_override : t.r_used_m;
    out.emplace_back(t.x_m - r, t.x_m - r_min);
    out.emplace_back(t.x_m + r_min, t.x_m + r);
  }
  return out;
}

// Plan table: "# track_plan v1", then "index x_m pair_index r_used_m" rows;
// an unpaired track has pair_index "single".
inline void write_plan(std::ostream& os, const TrackPlan& plan) {
  os << "# track_plan v1\n";
  os << "# index x_m pair_index r_used_m\n";
  os.precision(17);
  for (std::size_t i = 0; i < plan.tracks.size(); ++i) {
    const auto& t = plan.tracks[i];
    os << i << ' ' << t.x_m << ' ';
    if (t.pair_index) {
      os << *t.pair_index;
    } else {
      os << "single";
    }
    os << ' ' << t.r_used_m << '\n';
  }
}

inline TrackPlan read_plan(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line) || line != "# track_plan v1") {
    throw ParseError("expected header '# track_plan v1'", 1);
  }
  TrackPlan plan;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::size_t index = 0;
    std::string pair;
    Track t;
    if (!(row >> index >> t.x_m >> pair >> t.r_used_m) || index != plan.tracks.size()) {
      throw ParseError("expected 'index x_m pair_index r_used_m'", line_no);
    }
    if (pair != "single") {
      try {
        t.pair_index = std::stoi(pair);
      } catch (const std::exception&) {
        throw ParseError("bad pair index '" + pair + "'", line_no);
      }
    }
    if (!plan.tracks.empty() && !(t.x_m > plan.tracks.back().x_m)) {
      throw ParseError("track positions must increase", line_no);
    }
    plan.tracks.push_back(t);
  }
  return plan;
}

}  // namespace swathplan
