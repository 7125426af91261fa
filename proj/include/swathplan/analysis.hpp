#pragma once

// Post-mission data-quality analysis: coverage gaps, residual-risk
// histograms, 1-D Gaussian mixtures fitted by EM, and control-vs-adaptive
// comparison reports.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "swathplan/grid.hpp"
#include "swathplan/random.hpp"
#include "swathplan/simulator.hpp"

namespace swathplan {

struct CoverageMetrics {
  std::size_t uncovered_cells = 0;
  double uncovered_area_m2 = 0.0;
  double uncovered_fraction = 0.0;
  std::size_t analyzed_cells = 0;
  std::size_t n_tracks = 0;
  double path_length_m = 0.0;
};

namespace detail {

inline void check_margin(const RiskGrid& g, std::size_t margin) {
  if (2 * margin >= g.nx() || 2 * margin >= g.ny()) {
    throw InvalidParams("perimeter margin leaves no cells to analyze");
  }
}

template <typename F>
void for_each_inner(const RiskGrid& g, std::size_t margin, F f) {
  check_margin(g, margin);
  for (std::size_t iy = margin; iy < g.ny() - margin; ++iy)
    for (std::size_t ix = margin; ix < g.nx() - margin; ++ix) f(g.rr(ix, iy));
}

}  // namespace detail

// Cells with RR == 1 (never looked at) inside the margin-trimmed region.
inline CoverageMetrics coverage_metrics(const RiskGrid& grid, std::size_t perimeter_margin_cells) {
  CoverageMetrics m;
  detail::for_each_inner(grid, perimeter_margin_cells, [&](double rr) {
    ++m.analyzed_cells;
    if (rr == 1.0) ++m.uncovered_cells;
  });
  m.uncovered_area_m2 = static_cast<double>(m.uncovered_cells) * grid.cell_area();
  m.uncovered_fraction = static_cast<double>(m.uncovered_cells) / static_cast<double>(m.analyzed_cells);
  return m;
}

inline CoverageMetrics coverage_metrics(const MissionResult& r, std::size_t perimeter_margin_cells) {
  auto m = coverage_metrics(r.grid, perimeter_margin_cells);
  m.n_tracks = r.metrics.n_tracks;
  m.path_length_m = r.metrics.path_length_m;
  return m;
}

// RR values of covered cells (RR < 1); uncovered cells are coverage gaps,
// not data.
inline std::vector<double> covered_values(const RiskGrid& grid, std::size_t perimeter_margin_cells = 0) {
  std::vector<double> out;
  detail::for_each_inner(grid, perimeter_margin_cells, [&](double rr) {
    if (rr < 1.0) out.push_back(rr);
  });
  return out;
}

struct Histogram {
  std::vector<std::size_t> counts;  // bin i covers [i/n, (i+1)/n)
  double bin_width() const { return 1.0 / static_cast<double>(counts.size()); }
  std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

inline Histogram rr_histogram(const RiskGrid& grid, std::size_t n_bins, std::size_t perimeter_margin_cells = 0) {
  if (n_bins < 2) throw InvalidParams("histogram needs at least two bins");
  const auto values = covered_values(grid, perimeter_margin_cells);
  if (values.empty()) throw EmptyData("no covered cells (every RR is 1)");
  Histogram h;
  h.counts.assign(n_bins, 0);
  for (double v : values) {
    const auto b = std::min(static_cast<std::size_t>(v * static_cast<double>(n_bins)), n_bins - 1);
    ++h.counts[b];
  }
  return h;
}

struct GmmComponent {
  double weight = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

struct GmmFit {
  std::vector<GmmComponent> components;  // ascending mean
  double log_likelihood = 0.0;
  std::size_t n_points = 0;
  std::size_t iterations = 0;
  std::uint64_t seed_used = 0;
  std::vector<double> log_likelihood_trace;  // one entry per E-step
};

struct GmmOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 500;
  int max_restarts = 5;
  double min_sd = 1e-6;
};

namespace detail {

inline double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// Fills resp (row-major, n x k) with posterior component probabilities and
// returns the log-likelihood of x under the mixture.
inline double e_step(const std::vector<double>& x, const std::vector<GmmComponent>& comp, std::vector<double>& resp) {
  const auto k = comp.size();
  resp.resize(x.size() * k);
  std::vector<double> logp(k);
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      logp[j] = std::log(comp[j].weight) + log_normal_pdf(x[i], comp[j].mean, comp[j].sd);
      mx = std::max(mx, logp[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(logp[j] - mx);
    const double lse = mx + std::log(s);
    ll += lse;
    for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(logp[j] - lse);
  }
  return ll;
}

// k-means++ seeding: first centre uniform, later ones with probability
// proportional to squared distance from the nearest chosen centre.
inline std::vector<double> kmeanspp(const std::vector<double>& x, std::size_t k, Rng& rng) {
  std::vector<double> centers;
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  centers.push_back(x[pick(rng.engine())]);
  std::vector<double> d2(x.size());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
      d2[i] = best;
      total += best;
    }
    double u = rng.uniform(0.0, total);
    std::size_t chosen = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (u < d2[i]) {
        chosen = i;
        break;
      }
      u -= d2[i];
    }
    centers.push_back(x[chosen]);
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

// One EM run. Returns false when a component collapses.
inline bool run_em(const std::vector<double>& x, std::size_t k, Rng& rng, const GmmOptions& opt, GmmFit& fit) {
  const auto n = x.size();
  const auto nd = static_cast<double>(n);
  auto centers = kmeanspp(x, k, rng);

  double mean_all = 0.0;
  for (double v : x) mean_all += v;
  mean_all /= nd;
  double var_all = 0.0;
  for (double v : x) var_all += (v - mean_all) * (v - mean_all);
  var_all /= nd;
  const double sd0 = std::sqrt(var_all) / static_cast<double>(k);

  std::vector<GmmComponent> comp(k);
  for (std::size_t j = 0; j < k; ++j) comp[j] = {1.0 / static_cast<double>(k), centers[j], sd0};
  if (!(sd0 >= opt.min_sd)) return false;

  std::vector<double> resp(n * k);
  fit.log_likelihood_trace.clear();
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    const double ll = e_step(x, comp, resp);
    fit.log_likelihood_trace.push_back(ll);
    fit.log_likelihood = ll;
    fit.iterations = it + 1;
    if (ll - prev < opt.tolerance) break;
    prev = ll;

    // M-step
    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0, sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + j];
        sx += resp[i * k + j] * x[i];
      }
      if (!(nk > 0.0)) return false;
      const double mu = sx / nk;
      double sv = 0.0;
      for (std::size_t i = 0; i < n; ++i) sv += resp[i * k + j] * (x[i] - mu) * (x[i] - mu);
      const double sd = std::sqrt(sv / nk);
      if (!(sd >= opt.min_sd)) return false;
      comp[j] = {nk / nd, mu, sd};
    }
  }
  std::sort(comp.begin(), comp.end(), [](const auto& a, const auto& b) { return a.mean < b.mean; });
  fit.components = std::move(comp);
  fit.n_points = n;
  return true;
}

}  // namespace detail

// 1-D Gaussian mixture by EM, seeded k-means++ initialisation. A collapsed
// component triggers a restart with the next seed.
inline GmmFit fit_gmm(const std::vector<double>& values, std::size_t k, std::uint64_t rng_seed,
                      const GmmOptions& opt = {}) {
  if (values.empty()) throw EmptyData("no values to fit");
  if (k < 1) throw InvalidParams("need at least one mixture component");
  const std::set<double> distinct(values.begin(), values.end());
  if (k > distinct.size()) {
    throw InvalidParams("more components (" + std::to_string(k) + ") than distinct values (" +
                        std::to_string(distinct.size()) + ")");
  }
  for (int attempt = 0; attempt < opt.max_restarts; ++attempt) {
    const auto seed = rng_seed + static_cast<std::uint64_t>(attempt);
    Rng rng(seed);
    GmmFit fit;
    if (detail::run_em(values, k, rng, opt, fit)) {
      fit.seed_used = seed;
      return fit;
    }
  }
  throw DegenerateComponent("mixture component collapsed in every restart");
}

// Posterior component probabilities per value, row-major (values x components).
inline std::vector<double> gmm_responsibilities(const std::vector<double>& values, const GmmFit& fit) {
  std::vector<double> resp;
  detail::e_step(values, fit.components, resp);
  return resp;
}

struct ComponentStats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

inline ComponentStats rightmost_component_stats(const GmmFit& fit) {
  if (fit.components.empty()) throw InvalidParams("empty mixture");
  const auto& c = *std::max_element(fit.components.begin(), fit.components.end(),
                                    [](const auto& a, const auto& b) { return a.mean < b.mean; });
  return {c.mean, c.sd, static_cast<std::size_t>(std::llround(c.weight * static_cast<double>(fit.n_points)))};
}

// Everything the report needs about one grid.
struct QualitySummary {
  CoverageMetrics coverage;
  double mean_full = 0.0;
  ComponentStats rightmost;
  GmmFit gmm;
};

// Fits k components (fewer if the data has fewer distinct values). Data with
// a single distinct value is reported as one zero-width component.
inline QualitySummary summarize_quality(const RiskGrid& grid, std::size_t k, std::size_t margin,
                                        std::uint64_t seed) {
  QualitySummary q;
  q.coverage = coverage_metrics(grid, margin);
  const auto values = covered_values(grid, margin);
  if (values.empty()) throw EmptyData("no covered cells (every RR is 1)");
  double s = 0.0;
  for (double v : values) s += v;
  q.mean_full = s / static_cast<double>(values.size());
  const std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() == 1) {
    q.gmm.components = {{1.0, values.front(), 0.0}};
    q.gmm.n_points = values.size();
  } else {
    q.gmm = fit_gmm(values, std::min(k, distinct.size()), seed);
  }
  q.rightmost = rightmost_component_stats(q.gmm);
  return q;
}

struct ComparisonReport {
  QualitySummary control;
  QualitySummary adaptive;

  struct Row {
    std::string key;
    double control;
    double adaptive;
    double delta() const { return adaptive - control; }
  };

  std::vector<Row> rows() const {
    auto row = [](const char* key, auto get, const QualitySummary& c, const QualitySummary& a) {
      return Row{key, static_cast<double>(get(c)), static_cast<double>(get(a))};
    };
    return {
        row("n_tracks", [](const auto& q) { return q.coverage.n_tracks; }, control, adaptive),
        row("path_length_m", [](const auto& q) { return q.coverage.path_length_m; }, control, adaptive),
        row("uncovered_cells", [](const auto& q) { return q.coverage.uncovered_cells; }, control, adaptive),
        row("uncovered_area_m2", [](const auto& q) { return q.coverage.uncovered_area_m2; }, control, adaptive),
        row("uncovered_fraction", [](const auto& q) { return q.coverage.uncovered_fraction; }, control, adaptive),
        row("mean_full", [](const auto& q) { return q.mean_full; }, control, adaptive),
        row("rc_mean", [](const auto& q) { return q.rightmost.mean; }, control, adaptive),
        row("rc_sd", [](const auto& q) { return q.rightmost.sd; }, control, adaptive),
        row("rc_n", [](const auto& q) { return q.rightmost.n; }, control, adaptive),
    };
  }
};

inline ComparisonReport compare_missions(const MissionResult& control, const MissionResult& adaptive, std::size_t k,
                                         std::size_t margin = 1, std::uint64_t seed = 0) {
  if (!control.grid.same_shape(adaptive.grid)) throw AreaMismatch("missions were run over different areas");
  ComparisonReport r;
  r.control = summarize_quality(control.grid, k, margin, seed);
  r.adaptive = summarize_quality(adaptive.grid, k, margin, seed);
  r.control.coverage.n_tracks = control.metrics.n_tracks;
  r.control.coverage.path_length_m = control.metrics.path_length_m;
  r.adaptive.coverage.n_tracks = adaptive.metrics.n_tracks;
  r.adaptive.coverage.path_length_m = adaptive.metrics.path_length_m;
  return r;
}

inline void write_report_table(std::ostream& os, const ComparisonReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-20s %14s %14s %14s\n", "metric", "control", "adaptive", "delta");
  os << buf;
  for (const auto& row : r.rows()) {
    std::snprintf(buf, sizeof buf, "%-20s %14.6g %14.6g %14.6g\n", row.key.c_str(), row.control, row.adaptive,
                  row.delta());
    os << buf;
  }
}

// One "side.metric=value" line per metric; side is control, adaptive or delta.
inline void write_report_kv(std::ostream& os, const ComparisonReport& r) {
  const auto rows = r.rows();
  for (const char* side : {"control", "adaptive", "delta"}) {
    for (const auto& row : rows) {
      const double v = side[0] == 'c' ? row.control : side[0] == 'a' ? row.adaptive : row.delta();
      os << side << '.' << row.key << '=' << detail::format_exact(v) << '\n';
    }
  }
}

// Single-grid report: coverage, histogram, mixture components and the
// rightmost component, one "key=value" per line, values round-trip exact.
inline void write_quality_report(std::ostream& os, const QualitySummary& q, const Histogram& h) {
  using detail::format_exact;
  os << "coverage.analyzed_cells=" << q.coverage.analyzed_cells << '\n';
  os << "coverage.uncovered_cells=" << q.coverage.uncovered_cells << '\n';
  os << "coverage.uncovered_area_m2=" << format_exact(q.coverage.uncovered_area_m2) << '\n';
  os << "coverage.uncovered_fraction=" << format_exact(q.coverage.uncovered_fraction) << '\n';
  os << "rr.mean_full=" << format_exact(q.mean_full) << '\n';
  os << "histogram.bins=" << h.counts.size() << '\n';
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << "histogram.bin" << i << '=' << h.counts[i] << '\n';
  }
  os << "gmm.components=" << q.gmm.components.size() << '\n';
  os << "gmm.log_likelihood=" << format_exact(q.gmm.log_likelihood) << '\n';
  for (std::size_t i = 0; i < q.gmm.components.size(); ++i) {
    const auto& c = q.gmm.components[i];
    os << "gmm.c" << i << ".weight=" << format_exact(c.weight) << '\n';
    os << "gmm.c" << i << ".mean=" << format_exact(c.mean) << '\n';
    os << "gmm.c" << i << ".sd=" << format_exact(c.sd) << '\n';
  }
  os << "rc.mean=" << format_exact(q.rightmost.mean) << '\n';
  os << "rc.sd=" << format_exact(q.rightmost.sd) << '\n';
  os << "rc.n=" << q.rightmost.n << '\n';
}

}  // namespace swathplan
