#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swathplan/analysis.hpp"
#include "swathplan/experiment.hpp"

using namespace swathplan;

namespace {

RiskGrid filled(std::size_t nx, std::size_t ny, double v) {
  RiskGrid g(nx, ny, 5.0);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) g.set_rr(ix, iy, v);
  return g;
}

std::vector<double> two_gaussians(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> a(0.3, 0.02), b(0.8, 0.02);
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(i % 2 ? b(gen) : a(gen));
  return v;
}

MissionResult mission(double r_planned, Strategy s) {
  ExperimentSpec spec;
  spec.sensor = {40.0, r_planned, 130.0};
  spec.seed = 3;
  return run_mission(spec.mission(s));
}

}  // namespace

TEST(CoverageMetrics, FullyCovered) {
  const auto m = coverage_metrics(filled(10, 10, 0.5), 0);
  EXPECT_EQ(m.uncovered_cells, 0u);
  EXPECT_EQ(m.uncovered_area_m2, 0.0);
  EXPECT_EQ(m.uncovered_fraction, 0.0);
  EXPECT_EQ(m.analyzed_cells, 100u);
}

TEST(CoverageMetrics, OneUncoveredCell) {
  auto g = filled(10, 10, 0.5);
  g.set_rr(4, 4, 1.0);
  const auto m = coverage_metrics(g, 1);
  EXPECT_EQ(m.uncovered_cells, 1u);
  EXPECT_EQ(m.uncovered_area_m2, 25.0);
  EXPECT_DOUBLE_EQ(m.uncovered_fraction, 1.0 / 64.0);
}

TEST(CoverageMetrics, MarginExcludesPerimeter) {
  auto g = filled(10, 10, 0.5);
  g.set_rr(0, 3, 1.0);
  EXPECT_EQ(coverage_metrics(g, 0).uncovered_cells, 1u);
  EXPECT_EQ(coverage_metrics(g, 1).uncovered_cells, 0u);
  EXPECT_THROW(coverage_metrics(g, 5), InvalidParams);
}

TEST(CoverageMetrics, AdaptiveRecoversGapsOfOverestimate) {
  const auto control = coverage_metrics(mission(145.0, Strategy::predefined), 1);
  const auto adaptive = coverage_metrics(mission(145.0, Strategy::adaptive), 1);
  EXPECT_GT(control.uncovered_fraction, 0.0);
  EXPECT_LT(adaptive.uncovered_fraction, control.uncovered_fraction);
  EXPECT_EQ(control.n_tracks, 7u);
  EXPECT_EQ(adaptive.n_tracks, 8u);
  EXPECT_EQ(adaptive.path_length_m, 3200.0);
}

TEST(Histogram, SingleValueOccupiesOneBin) {
  const auto h = rr_histogram(filled(10, 10, 0.7), 10);
  EXPECT_EQ(h.counts[7], 100u);
  EXPECT_EQ(h.total(), 100u);
}

TEST(Histogram, UncoveredCellsExcluded) {
  auto g = filled(10, 10, 0.7);
  g.set_rr(1, 1, 1.0);
  g.set_rr(2, 2, 1.0);
  EXPECT_EQ(rr_histogram(g, 10).total(), 98u);
}

TEST(Histogram, TwoValues) {
  auto g = filled(10, 10, 0.6);
  for (std::size_t ix = 0; ix < 3; ++ix)
    for (std::size_t iy = 0; iy < 10; ++iy) g.set_rr(ix, iy, 0.84);
  const auto h = rr_histogram(g, 20);
  EXPECT_EQ(h.counts[12], 70u);
  EXPECT_EQ(h.counts[16], 30u);
  EXPECT_EQ(h.total(), 100u);
}

TEST(Histogram, Errors) {
  EXPECT_THROW(rr_histogram(filled(4, 4, 1.0), 10), EmptyData);
  EXPECT_THROW(rr_histogram(filled(4, 4, 0.5), 1), InvalidParams);
}

TEST(Histogram, CountsEveryCoveredCell) {
  const auto r = mission(130.0, Strategy::adaptive);
  const auto values = covered_values(r.grid, 0);
  EXPECT_EQ(rr_histogram(r.grid, 37).total(), values.size());
}

TEST(Gmm, SingleComponentIsClosedFormMle) {
  std::mt19937_64 gen(4);
  std::gamma_distribution<double> d(2.0, 0.1);
  std::vector<double> v(5000);
  for (auto& x : v) x = d(gen);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));

  const auto fit = fit_gmm(v, 1, 0);
  ASSERT_EQ(fit.components.size(), 1u);
  EXPECT_NEAR(fit.components[0].mean, mean, 1e-9);
  EXPECT_NEAR(fit.components[0].sd, sd, 1e-9);
  EXPECT_NEAR(fit.components[0].weight, 1.0, 1e-12);
}

TEST(Gmm, RecoversWellSeparatedMixture) {
  const auto v = two_gaussians(17, 10000);
  const auto fit = fit_gmm(v, 2, 5);
  ASSERT_EQ(fit.components.size(), 2u);
  EXPECT_NEAR(fit.components[0].mean, 0.3, 0.01);
  EXPECT_NEAR(fit.components[1].mean, 0.8, 0.01);
  EXPECT_NEAR(fit.components[1].sd, 0.02, 0.002);
  double wsum = 0.0;
  for (const auto& c : fit.components) wsum += c.weight;
  EXPECT_NEAR(wsum, 1.0, 1e-9);

  const auto rc = rightmost_component_stats(fit);
  EXPECT_NEAR(rc.mean, 0.8, 0.01);
  EXPECT_NEAR(rc.sd, 0.02, 0.002);
  EXPECT_NEAR(static_cast<double>(rc.n), 5000.0, 50.0);
}

TEST(Gmm, LogLikelihoodNeverDecreases) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (std::size_t k : {2u, 3u}) {
      const auto fit = fit_gmm(two_gaussians(seed, 3000), k, seed);
      const auto& t = fit.log_likelihood_trace;
      for (std::size_t i = 1; i < t.size(); ++i) ASSERT_GE(t[i], t[i - 1] - 1e-9 * std::abs(t[i - 1]));
    }
  }
  const auto grid_values = covered_values(mission(145.0, Strategy::predefined).grid, 1);
  const auto fit = fit_gmm(grid_values, 3, 1);
  for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i)
    ASSERT_GE(fit.log_likelihood_trace[i], fit.log_likelihood_trace[i - 1] - 1e-9 * std::abs(fit.log_likelihood));
}

TEST(Gmm, ResponsibilitiesSumToOne) {
  const auto v = two_gaussians(2, 2000);
  const auto fit = fit_gmm(v, 3, 2);
  const auto resp = gmm_responsibilities(v, fit);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += resp[i * 3 + j];
    ASSERT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Gmm, ComponentsSortedByMean) {
  const auto fit = fit_gmm(two_gaussians(9, 4000), 3, 9);
  for (std::size_t j = 1; j < fit.components.size(); ++j)
    EXPECT_LE(fit.components[j - 1].mean, fit.components[j].mean);
}

TEST(Gmm, InputErrors) {
  EXPECT_THROW(fit_gmm({}, 1, 0), EmptyData);
  EXPECT_THROW(fit_gmm({0.1, 0.2}, 0, 0), InvalidParams);
  EXPECT_THROW(fit_gmm({0.1, 0.1, 0.2}, 3, 0), InvalidParams);
}

TEST(Gmm, CollapsingComponentGivesUpAfterRestarts) {
  std::vector<double> v(500, 0.5);
  v.push_back(0.9);
  EXPECT_THROW(fit_gmm(v, 2, 0), DegenerateComponent);
}

TEST(Gmm, SameSeedSameFit) {
  const auto v = two_gaussians(1, 3000);
  const auto a = fit_gmm(v, 2, 11);
  const auto b = fit_gmm(v, 2, 11);
  EXPECT_EQ(a.log_likelihood, b.log_likelihood);
  EXPECT_EQ(a.components[1].mean, b.components[1].mean);
}

TEST(RightmostComponent, SelectionArithmetic) {
  GmmFit fit;
  fit.components = {{0.4, 0.6, 0.05}, {0.6, 0.8, 0.05}};
  fit.n_points = 1000;
  const auto rc = rightmost_component_stats(fit);
  EXPECT_EQ(rc.mean, 0.8);
  EXPECT_EQ(rc.sd, 0.05);
  EXPECT_EQ(rc.n, 600u);

  GmmFit single;
  single.components = {{1.0, 0.7, 0.1}};
  single.n_points = 10;
  EXPECT_EQ(rightmost_component_stats(single).n, 10u);
}

TEST(CompareMissions, IdenticalMissionsHaveZeroDeltas) {
  const auto r = mission(130.0, Strategy::adaptive);
  const auto report = compare_missions(r, r, 2);
  for (const auto& row : report.rows()) EXPECT_EQ(row.delta(), 0.0) << row.key;
}

TEST(CompareMissions, SwapNegatesDeltas) {
  const auto c = mission(130.0, Strategy::predefined);
  const auto a = mission(130.0, Strategy::adaptive);
  const auto fwd = compare_missions(c, a, 2).rows();
  const auto rev = compare_missions(a, c, 2).rows();
  ASSERT_EQ(fwd.size(), rev.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) EXPECT_EQ(fwd[i].delta(), -rev[i].delta()) << fwd[i].key;
}

TEST(CompareMissions, TrackCountsOfOverestimate) {
  const auto report =
      compare_missions(mission(145.0, Strategy::predefined), mission(145.0, Strategy::adaptive), 3);
  EXPECT_EQ(report.control.coverage.n_tracks, 7u);
  EXPECT_EQ(report.adaptive.coverage.n_tracks, 8u);
}

TEST(CompareMissions, AdaptiveLowersWorstDataAtUsualRange) {
  const auto report =
      compare_missions(mission(130.0, Strategy::predefined), mission(130.0, Strategy::adaptive), 2);
  EXPECT_LT(report.adaptive.rightmost.mean, report.control.rightmost.mean);
}

TEST(CompareMissions, AreaMismatch) {
  ExperimentSpec s;
  s.area = SurveyArea(800.0, 400.0, 5.0);
  const auto small = run_mission(s.mission(Strategy::adaptive));
  EXPECT_THROW(compare_missions(mission(130.0, Strategy::adaptive), small, 2), AreaMismatch);
}

TEST(CompareMissions, KeyValueBlockHasOneMetricPerLine) {
  const auto r = mission(130.0, Strategy::adaptive);
  std::ostringstream os;
  write_report_kv(os, compare_missions(r, r, 2));
  std::istringstream is(os.str());
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    EXPECT_NE(line.find('='), std::string::npos);
    ++n;
  }
  EXPECT_EQ(n, 27);
}
