#pragma once

// Experiment definition files: flat "key = value" lines grouped under
// [section] headers. '#' starts a comment. Unknown sections or keys are
// rejected so typos cannot silently fall back to defaults.
//
//   name = experiment1
//   [area]      width length cell_size
//   [sensor]    r_min r_planned r_true
//   [curve]     peak_range peak_pd rise_width fall_width(number|auto) support
//   [mission]   threshold noise_sd seed pool_samples range_step
//   [analysis]  gmm_components perimeter_margin histogram_bins
//   [output]    directory
//
// fall_width = auto places P_d(r_true) exactly on the threshold.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "swathplan/core.hpp"
#include "swathplan/errors.hpp"
#include "swathplan/pdmodel.hpp"
#include "swathplan/simulator.hpp"

namespace swathplan {

struct ExperimentSpec {
  std::string name = "experiment";
  SurveyArea area{1212.0, 400.0, 5.0};
  SensorSpec sensor{40.0, 130.0, 130.0};
  PdCurveParams curve;
  bool fall_width_auto = true;
  double support_m = 200.0;
  double threshold = 0.05;
  double noise_sd = 0.02;
  std::uint64_t seed = 1;
  bool pool_samples = false;
  double range_step_m = 1.0;
  std::size_t gmm_components = 2;
  std::size_t perimeter_margin = 1;
  std::size_t histogram_bins = 50;
  std::string output_dir;

  PdCurveParams resolved_curve() const {
    PdCurveParams p = curve;
    if (fall_width_auto) p.fall_width_m = fall_width_through(p.peak_range_m, p.peak_pd, sensor.r_true_m, threshold);
    return p;
  }

  PdCurve true_curve() const { return synth_curve(resolved_curve(), sensor.r_min_m, support_m); }

  MissionConfig mission(Strategy s) const {
    MissionConfig c;
    c.area = area;
    c.sensor = sensor;
    c.strategy = s;
    c.true_curve = true_curve();
    c.threshold = threshold;
    c.noise_sd = noise_sd;
    c.rng_seed = seed;
    c.pool_samples = pool_samples;
    c.range_step_m = range_step_m;
    return c;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& v, int line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::logic_error&) {
    throw ParseError("expected a number, got '" + v + "'", line);
  }
  if (used != v.size()) throw ParseError("expected a number, got '" + v + "'", line);
  return out;
}

inline std::uint64_t parse_count(const std::string& v, int line) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("expected a non-negative integer, got '" + v + "'", line);
  }
  try {
    return std::stoull(v);
  } catch (const std::logic_error&) {
    throw ParseError("integer out of range: '" + v + "'", line);
  }
}

inline bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ParseError("expected true/false, got '" + v + "'", line);
}

}  // namespace detail

inline ExperimentSpec parse_experiment(std::istream& is) {
  using detail::parse_count;
  using detail::parse_real;
  ExperimentSpec s;
  double width = s.area.width_m, length = s.area.length_m, cell = s.area.cell_size_m;

  using Setter = std::function<void(const std::string&, int)>;
  const std::map<std::string, Setter> keys = {
      {".name", [&](const std::string& v, int) { s.name = v; }},
      {"area.width", [&](const std::string& v, int l) { width = parse_real(v, l); }},
      {"area.length", [&](const std::string& v, int l) { length = parse_real(v, l); }},
      {"area.cell_size", [&](const std::string& v, int l) { cell = parse_real(v, l); }},
      {"sensor.r_min", [&](const std::string& v, int l) { s.sensor.r_min_m = parse_real(v, l); }},
      {"sensor.r_planned", [&](const std::string& v, int l) { s.sensor.r_planned_m = parse_real(v, l); }},
      {"sensor.r_true", [&](const std::string& v, int l) { s.sensor.r_true_m = parse_real(v, l); }},
      {"curve.peak_range", [&](const std::string& v, int l) { s.curve.peak_range_m = parse_real(v, l); }},
      {"curve.peak_pd", [&](const std::string& v, int l) { s.curve.peak_pd = parse_real(v, l); }},
      {"curve.rise_width", [&](const std::string& v, int l) { s.curve.rise_width_m = parse_real(v, l); }},
      {"curve.fall_width",
       [&](const std::string& v, int l) {
         s.fall_width_auto = v == "auto";
         if (!s.fall_width_auto) s.curve.fall_width_m = parse_real(v, l);
       }},
      {"curve.support", [&](const std::string& v, int l) { s.support_m = parse_real(v, l); }},
      {"mission.threshold", [&](const std::string& v, int l) { s.threshold = parse_real(v, l); }},
      {"mission.noise_sd", [&](const std::string& v, int l) { s.noise_sd = parse_real(v, l); }},
      {"mission.seed", [&](const std::string& v, int l) { s.seed = parse_count(v, l); }},
      {"mission.pool_samples", [&](const std::string& v, int l) { s.pool_samples = detail::parse_bool(v, l); }},
      {"mission.range_step", [&](const std::string& v, int l) { s.range_step_m = parse_real(v, l); }},
      {"analysis.gmm_components", [&](const std::string& v, int l) { s.gmm_components = parse_count(v, l); }},
      {"analysis.perimeter_margin", [&](const std::string& v, int l) { s.perimeter_margin = parse_count(v, l); }},
      {"analysis.histogram_bins", [&](const std::string& v, int l) { s.histogram_bins = parse_count(v, l); }},
      {"output.directory", [&](const std::string& v, int) { s.output_dir = v; }},
  };
  const std::map<std::string, int> sections = {{"area", 0},    {"sensor", 0},   {"curve", 0},
                                               {"mission", 0}, {"analysis", 0}, {"output", 0}};

  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ParseError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    const auto it = keys.find(section + "." + key);
    if (it == keys.end()) {
      throw ParseError("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"), line_no);
    }
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no);
    it->second(value, line_no);
  }
  if (line_no == 0) throw ParseError("empty experiment file", 0);

  try {
    s.area = SurveyArea(width, length, cell);
    validate_sensor(s.sensor);
    if (!(s.threshold > 0.0 && s.threshold < 1.0)) throw InvalidParams("threshold must be in (0,1)");
    if (s.noise_sd < 0.0) throw InvalidParams("noise_sd must be non-negative");
    if (!(s.range_step_m > 0.0)) throw InvalidParams("range_step must be positive");
    if (s.gmm_components < 1) throw InvalidParams("gmm_components must be at least 1");
    if (s.histogram_bins < 2) throw InvalidParams("histogram_bins must be at least 2");
    if (s.support_m < s.sensor.r_true_m) throw InvalidParams("curve support must reach r_true");
    (void)s.true_curve();
  } catch (const InfeasiblePairing&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
  return s;
}

}  // namespace swathplan
