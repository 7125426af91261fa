#pragma once

// Residual-risk grid: per-cell product of (1 - P_d) over all looks, plus the
// look tally and look ranges needed to audit it.

#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "swathplan/core.hpp"
#include "swathplan/errors.hpp"

namespace swathplan {

class RiskGrid {
 public:
  RiskGrid() = default;
  RiskGrid(std::size_t nx, std::size_t ny, double cell_size_m)
      : nx_(nx), ny_(ny), cell_(cell_size_m), rr_(nx * ny, 1.0), counts_(nx * ny, 0), ranges_(nx * ny) {
    if (nx == 0 || ny == 0 || !(cell_size_m > 0.0)) throw InvalidParams("empty risk grid");
  }
  explicit RiskGrid(const SurveyArea& area) : RiskGrid(area.cells_x(), area.cells_y(), area.cell_size_m) {}

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return rr_.size(); }
  double cell_size() const { return cell_; }
  double cell_area() const { return cell_ * cell_; }
  double center_x(std::size_t ix) const { return (static_cast<double>(ix) + 0.5) * cell_; }

  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx_ + ix; }
  double rr(std::size_t ix, std::size_t iy) const { return rr_[index(ix, iy)]; }
  int look_count(std::size_t ix, std::size_t iy) const { return counts_[index(ix, iy)]; }
  const std::vector<double>& look_ranges(std::size_t ix, std::size_t iy) const { return ranges_[index(ix, iy)]; }

  const std::vector<double>& rr_values() const { return rr_; }
  const std::vector<int>& look_counts() const { return counts_; }

  void add_look(std::size_t ix, std::size_t iy, double range, double pd) {
    const auto i = index(ix, iy);
    rr_[i] *= 1.0 - pd;
    ++counts_[i];
    ranges_[i].push_back(range);
  }

  // Overwrite a cell's RR directly; used when loading exported grids, which
  // carry no look history.
  void set_rr(std::size_t ix, std::size_t iy, double value) {
    if (!(value >= 0.0 && value <= 1.0)) throw InvalidParams("residual risk out of [0,1]");
    rr_[index(ix, iy)] = value;
  }
  void set_look_count(std::size_t ix, std::size_t iy, int n) { counts_[index(ix, iy)] = n; }

  bool same_shape(const RiskGrid& o) const { return nx_ == o.nx_ && ny_ == o.ny_ && cell_ == o.cell_; }

 private:
  std::size_t nx_ = 0, ny_ = 0;
  double cell_ = 0.0;
  std::vector<double> rr_;
  std::vector<int> counts_;
  std::vector<std::vector<double>> ranges_;
};

namespace detail {

inline std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Get>
void write_rows(std::ostream& os, const RiskGrid& g, const char* kind, Get get) {
  os << "# " << kind << " v1 nx=" << g.nx() << " ny=" << g.ny() << " cell=" << format_exact(g.cell_size())
     << '\n';
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      if (ix) os << ',';
      os << get(ix, iy);
    }
    os << '\n';
  }
}

struct GridHeader {
  std::size_t nx = 0, ny = 0;
  double cell = 0.0;
};

inline GridHeader read_header(std::istream& is, const std::string& kind) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty grid file", 1);
  std::istringstream h(line);
  std::string hash, k, ver;
  h >> hash >> k >> ver;
  if (hash != "#" || k != kind || ver != "v1") throw ParseError("expected header '# " + kind + " v1 ...'", 1);
  GridHeader out;
  std::string kv;
  while (h >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("bad header field '" + kv + "'", 1);
    const auto key = kv.substr(0, eq);
    const auto val = kv.substr(eq + 1);
    try {
      if (key == "nx") out.nx = std::stoul(val);
      else if (key == "ny") out.ny = std::stoul(val);
      else if (key == "cell") out.cell = std::stod(val);
      else throw ParseError("unknown header field '" + key + "'", 1);
    } catch (const std::logic_error&) {
      throw ParseError("bad header value '" + kv + "'", 1);
    }
  }
  if (out.nx == 0 || out.ny == 0 || !(out.cell > 0.0)) throw ParseError("header needs nx, ny and cell", 1);
  return out;
}

template <typename Set>
void read_rows(std::istream& is, const GridHeader& h, Set set) {
  std::string line;
  for (std::size_t iy = 0; iy < h.ny; ++iy) {
    const int line_no = static_cast<int>(iy) + 2;
    if (!std::getline(is, line)) throw ParseError("missing grid row", line_no);
    std::istringstream row(line);
    std::string field;
    std::size_t ix = 0;
    while (std::getline(row, field, ',')) {
      if (ix >= h.nx) throw ParseError("too many values in row", line_no);
      double v = 0.0;
      std::size_t used = 0;
      try {
        v = std::stod(field, &used);
      } catch (const std::logic_error&) {
        throw ParseError("bad number '" + field + "'", line_no);
      }
      if (used != field.size()) throw ParseError("bad number '" + field + "'", line_no);
      set(ix, iy, v, line_no);
      ++ix;
    }
    if (ix != h.nx) throw ParseError("expected " + std::to_string(h.nx) + " values in row", line_no);
  }
  while (std::getline(is, line)) {
    if (!line.empty()) throw ParseError("trailing data after grid rows", static_cast<int>(h.ny) + 2);
  }
}

}  // namespace detail

// "# rr_grid v1 nx=.. ny=.. cell=..", then ny rows of nx comma-separated RR
// values (row = track-axis index). Values are printed round-trip exact.
inline void write_rr_grid(std::ostream& os, const RiskGrid& g) {
  detail::write_rows(os, g, "rr_grid", [&](auto ix, auto iy) { return detail::format_exact(g.rr(ix, iy)); });
}

inline void write_look_count_grid(std::ostream& os, const RiskGrid& g) {
  detail::write_rows(os, g, "look_count_grid", [&](auto ix, auto iy) { return g.look_count(ix, iy); });
}

inline RiskGrid read_rr_grid(std::istream& is) {
  const auto h = detail::read_header(is, "rr_grid");
  RiskGrid g(h.nx, h.ny, h.cell);
  detail::read_rows(is, h, [&](std::size_t ix, std::size_t iy, double v, int line_no) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError("residual risk out of [0,1]", line_no);
    g.set_rr(ix, iy, v);
  });
  return g;
}

// Merges a look-count grid into g (same shape required).
inline void read_look_count_grid(std::istream& is, RiskGrid& g) {
  const auto h = detail::read_header(is, "look_count_grid");
  if (h.nx != g.nx() || h.ny != g.ny() || h.cell != g.cell_size()) {
    throw ParseError("look-count grid shape differs from risk grid", 1);
  }
  detail::read_rows(is, h, [&](std::size_t ix, std::size_t iy, double v, int line_no) {
    if (v < 0.0 || v != static_cast<double>(static_cast<int>(v))) throw ParseError("bad look count", line_no);
    g.set_look_count(ix, iy, static_cast<int>(v));
  });
}

}  // namespace swathplan
