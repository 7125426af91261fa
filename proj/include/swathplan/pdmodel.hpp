#pragma once

// Range-dependent probability of detection: representation, synthesis,
// estimation from noisy observations, and effective-range extraction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "swathplan/errors.hpp"

namespace swathplan {

// Piecewise-linear P_d over 1 m knots spanning [0, floor(support)]. Zero inside
// the nadir gap and past the support bound.
class PdCurve {
 public:
  PdCurve() = default;

  // knots[i] is P_d at range i metres; knots below r_min are forced to zero.
  PdCurve(double r_min, double support, std::vector<double> knots)
      : r_min_(r_min), support_(support), knots_(std::move(knots)) {
    if (!(r_min >= 0.0) || !(support > r_min)) {
      throw InvalidParams("pd curve needs 0 <= r_min < support");
    }
    const auto expected = static_cast<std::size_t>(std::floor(support)) + 1;
    if (knots_.size() != expected) {
      throw InvalidParams("pd curve needs one knot per metre from 0 to the support bound");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (!(knots_[i] >= 0.0 && knots_[i] <= 1.0)) {
        throw InvalidParams("pd knot out of [0,1] at range " + std::to_string(i));
      }
      if (static_cast<double>(i) < r_min_) knots_[i] = 0.0;
    }
  }

  double r_min() const { return r_min_; }
  double support() const { return support_; }
  const std::vector<double>& knots() const { return knots_; }

  double operator()(double y) const {
    if (knots_.empty() || y < r_min_ || y > support_) return 0.0;
    const auto last = knots_.size() - 1;
    const auto i = static_cast<std::size_t>(std::floor(y));
    if (i >= last) return knots_[last];
    const double t = y - static_cast<double>(i);
    return knots_[i] + t * (knots_[i + 1] - knots_[i]);
  }

  // Rises to a single plateau/peak and then falls, on the knots in [r_min, support].
  bool unimodal() const {
    bool falling = false;
    for (std::size_t i = first_knot() + 1; i < knots_.size(); ++i) {
      const double d = knots_[i] - knots_[i - 1];
      if (d < 0.0) falling = true;
      if (d > 0.0 && falling) return false;
    }
    return true;
  }

  // Trapezoid rule over the knots.
  double integral() const {
    double sum = 0.0;
    for (std::size_t i = 1; i < knots_.size(); ++i) sum += 0.5 * (knots_[i] + knots_[i - 1]);
    return sum;
  }

  std::size_t first_knot() const { return static_cast<std::size_t>(std::ceil(r_min_)); }

  bool operator==(const PdCurve&) const = default;

 private:
  double r_min_ = 0.0;
  double support_ = 0.0;
  std::vector<double> knots_;
};

struct PdCurveParams {
  double peak_range_m = 70.0;
  double peak_pd = 0.4;
  double rise_width_m = 15.0;
  double fall_width_m = 30.0;
};

struct PdSample {
  double range_m = 0.0;
  double pd_obs = 0.0;
};

// Fall width that makes the descending branch pass through (range_m, pd).
inline double fall_width_through(double peak_range_m, double peak_pd, double range_m, double pd) {
  if (!(range_m > peak_range_m) || !(pd > 0.0) || !(pd < peak_pd)) {
    throw InvalidParams("anchor point must lie beyond the peak and below the peak value");
  }
  return (range_m - peak_range_m) / std::sqrt(2.0 * std::log(peak_pd / pd));
}

// Asymmetric Gaussian bell, sampled on 1 m knots.
inline PdCurve synth_curve(const PdCurveParams& p, double r_min, double support) {
  if (!(r_min >= 0.0) || !(p.peak_range_m > r_min) || !(p.peak_range_m < support)) {
    throw InvalidParams("peak range must lie strictly inside (r_min, support)");
  }
  if (!(p.peak_pd > 0.0 && p.peak_pd <= 1.0)) throw InvalidParams("peak_pd must be in (0,1]");
  if (!(p.rise_width_m > 0.0) || !(p.fall_width_m > 0.0)) {
    throw InvalidParams("rise and fall widths must be positive");
  }
  std::vector<double> knots(static_cast<std::size_t>(std::floor(support)) + 1, 0.0);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double y = static_cast<double>(i);
    if (y < r_min) continue;
    const double d = y - p.peak_range_m;
    const double w = y < p.peak_range_m ? p.rise_width_m : p.fall_width_m;
    knots[i] = p.peak_pd * std::exp(-(d * d) / (2.0 * w * w));
  }
  return PdCurve(r_min, support, std::move(knots));
}

// Largest knot range with P_d >= threshold. A 1e-12 slack absorbs rounding in
// curves constructed to hit the threshold exactly.
inline double effective_range(const PdCurve& curve, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidParams("threshold must be in (0,1)");
  const auto& k = curve.knots();
  const auto first = curve.first_knot();
  for (std::size_t i = k.size(); i-- > first;) {
    if (k[i] >= threshold - 1e-12) return static_cast<double>(i);
  }
  throw NoAdmissibleRange("pd curve never reaches threshold " + std::to_string(threshold));
}

namespace detail {

// Pool-adjacent-violators; non-decreasing least-squares fit, equal weights.
inline void isotonic_increasing(std::vector<double>::iterator first, std::vector<double>::iterator last) {
  struct Block {
    double sum;
    std::size_t n;
  };
  std::vector<Block> blocks;
  for (auto it = first; it != last; ++it) {
    blocks.push_back({*it, 1});
    while (blocks.size() > 1) {
      auto& a = blocks[blocks.size() - 2];
      const auto& b = blocks.back();
      if (a.sum / static_cast<double>(a.n) <= b.sum / static_cast<double>(b.n)) break;
      a.sum += b.sum;
      a.n += b.n;
      blocks.pop_back();
    }
  }
  auto out = first;
  for (const auto& b : blocks) {
    const double mean = b.sum / static_cast<double>(b.n);
    for (std::size_t j = 0; j < b.n; ++j) *out++ = mean;
  }
}

}  // namespace detail

// Estimates a curve from noisy observations: 5 m bin means, linear
// interpolation through them (linear extrapolation at the ends), clamping, and
// isotonic smoothing either side of the empirical peak.
inline PdCurve fit_curve(const std::vector<PdSample>& samples, double r_min, double support) {
  if (!(r_min >= 0.0) || !(support > r_min)) throw InvalidParams("fit needs 0 <= r_min < support");

  auto covered = [&](double lo, double hi, bool closed) {
    return std::any_of(samples.begin(), samples.end(), [&](const PdSample& s) {
      return s.range_m >= lo && (s.range_m < hi || (closed && s.range_m <= hi));
    });
  };
  for (double lo = r_min; lo < support; lo += 10.0) {
    const double hi = std::min(lo + 10.0, support);
    if (!covered(lo, hi, hi >= support)) {
      throw InsufficientData("no pd samples in range bin [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
  }

  constexpr double kBin = 5.0;
  const auto n_bins = static_cast<std::size_t>(std::ceil((support - r_min) / kBin - 1e-9));
  std::vector<double> sum_r(n_bins, 0.0), sum_p(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (const auto& s : samples) {
    if (s.range_m < r_min || s.range_m > support) continue;
    auto b = static_cast<std::size_t>((s.range_m - r_min) / kBin);
    b = std::min(b, n_bins - 1);
    sum_r[b] += s.range_m;
    sum_p[b] += s.pd_obs;
    ++count[b];
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    const auto n = static_cast<double>(count[b]);
    pts.emplace_back(sum_r[b] / n, sum_p[b] / n);
  }

  auto interp = [&](double y) {
    if (pts.size() == 1) return pts.front().second;
    std::size_t j = 1;
    while (j + 1 < pts.size() && pts[j].first < y) ++j;
    const auto& [x0, p0] = pts[j - 1];
    const auto& [x1, p1] = pts[j];
    if (x1 == x0) return p1;
    return p0 + (y - x0) * (p1 - p0) / (x1 - x0);
  };

  std::vector<double> knots(static_cast<std::size_t>(std::floor(support)) + 1, 0.0);
  const auto first = static_cast<std::size_t>(std::ceil(r_min));
  for (std::size_t i = first; i < knots.size(); ++i) {
    knots[i] = std::clamp(interp(static_cast<double>(i)), 0.0, 1.0);
  }
  if (first < knots.size()) {
    const auto begin = knots.begin() + static_cast<std::ptrdiff_t>(first);
    const auto peak = std::max_element(begin, knots.end());
    detail::isotonic_increasing(begin, peak + 1);
    // Non-increasing tail = non-decreasing fit of the reversed tail.
    std::reverse(peak, knots.end());
    detail::isotonic_increasing(peak, knots.end());
    std::reverse(peak, knots.end());
  }
  return PdCurve(r_min, support, std::move(knots));
}

// "# pd_curve v1" followed by "range pd" rows, one per knot. A second comment
// line records r_min and support so import is lossless.
inline void write_curve(std::ostream& os, const PdCurve& c) {
  os << "# pd_curve v1\n";
  os.precision(17);
  os << "# r_min=" << c.r_min() << " support=" << c.support() << '\n';
  for (std::size_t i = 0; i < c.knots().size(); ++i) os << i << ' ' << c.knots()[i] << '\n';
}

inline PdCurve read_curve(std::istream& is) {
  std::string line;
  int line_no = 0;
  if (!std::getline(is, line) || line != "# pd_curve v1") {
    throw ParseError("expected header '# pd_curve v1'", 1);
  }
  ++line_no;
  double r_min = -1.0, support = -1.0;
  std::vector<double> knots;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq);
        const double v = std::stod(kv.substr(eq + 1));
        if (key == "r_min") r_min = v;
        if (key == "support") support = v;
      }
      continue;
    }
    std::istringstream row(line);
    double range = 0.0, pd = 0.0;
    if (!(row >> range >> pd)) throw ParseError("expected 'range pd'", line_no);
    if (range != static_cast<double>(knots.size())) {
      throw ParseError("knots must be consecutive integer metres from 0", line_no);
    }
    knots.push_back(pd);
  }
  if (knots.size() < 2) throw ParseError("pd curve has fewer than two knots", line_no);
  if (support < 0.0) support = static_cast<double>(knots.size() - 1);
  if (r_min < 0.0) {
    const auto nz = std::find_if(knots.begin(), knots.end(), [](double v) { return v > 0.0; });
    r_min = static_cast<double>(nz - knots.begin());
  }
  return PdCurve(r_min, support, std::move(knots));
}

}  // namespace swathplan
