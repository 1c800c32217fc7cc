#pragma once

// SVG pictures of surface decompositions in an affine chart. Projective
// segments are straight there, so cells are plain polygons.

#include "projcell/decomp.hpp"

#include <cstdio>
#include <sstream>

namespace projcell::svg {

struct Style {
  int size = 800;
  double margin = 0.05;
  std::string background = "#ffffff";
  std::string boundary = "#222222";
  std::string cell_stroke = "#3060a0";
  std::string fundamental_fill = "#f0c060";
  std::string provisional_stroke = "#c03030";
  std::string orbit = "#208040";
};

namespace detail {

inline std::vector<Eigen::Vector2d> angular_order(std::vector<Eigen::Vector2d> pts) {
  if (pts.empty()) return pts;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  return pts;
}

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace detail

/// Picture of a 2-dimensional domain with the cells of a decomposition and
/// optional extra points (orbit samples). Requires a 3-dimensional cone.
inline std::string render(const ConeModel& cone, const CellDecomposition* dec,
                          const std::vector<Vec>& points = {}, const Style& style = {}) {
  if (cone.dim() != 3) throw Error("rendering needs a 3-dimensional cone");
  const Chart chart = dec ? dec->chart : cone.chart();
  auto to2 = [&](const Vec& x) {
    Vec c = chart.to_chart(x);
    return Eigen::Vector2d(c(0), c(1));
  };

  std::vector<Eigen::Vector2d> bd;
  for (const auto& b : cone.boundary_samples(cone.variant() == ConeVariant::Lorentz ? 360 : 2000)) {
    if (chart.ell.dot(b) <= 0) continue;
    bd.push_back(to2(b));
  }
  bd = detail::angular_order(bd);

  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const auto& p : bd) {
    lo_x = std::min(lo_x, p.x());
    hi_x = std::max(hi_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_y = std::max(hi_y, p.y());
  }
  if (bd.empty()) lo_x = lo_y = -1, hi_x = hi_y = 1;
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  const double S = style.size;
  const double scale = S * (1 - 2 * style.margin) / span;
  auto sx = [&](const Eigen::Vector2d& p) {
    return detail::num(S * style.margin + (p.x() - lo_x) * scale);
  };
  auto sy = [&](const Eigen::Vector2d& p) {
    return detail::num(S - S * style.margin - (p.y() - lo_y) * scale);
  };
  auto poly = [&](const std::vector<Eigen::Vector2d>& ps) {
    std::string s;
    for (const auto& p : ps) s += sx(p) + "," + sy(p) + " ";
    if (!s.empty()) s.pop_back();
    return s;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.size << "\" height=\""
    << style.size << "\" viewBox=\"0 0 " << style.size << " " << style.size << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"" << style.background << "\"/>\n";
  o << "<polygon points=\"" << poly(bd) << "\" fill=\"none\" stroke=\"" << style.boundary
    << "\" stroke-width=\"1.5\"/>\n";

  if (dec) {
    std::set<int> fundamental(dec->fundamental.cells.begin(), dec->fundamental.cells.end());
    std::set<int> provisional(dec->provisional.begin(), dec->provisional.end());
    for (std::size_t i = 0; i < dec->cells.size(); ++i) {
      const Cell& c = dec->cells[i];
      if (c.dim != 2) continue;
      std::vector<Eigen::Vector2d> ps;
      for (int v : c.vertices) ps.push_back(to2(dec->vertices[v].lift));
      ps = detail::angular_order(ps);
      const bool fund = fundamental.count(static_cast<int>(i)) > 0;
      const bool prov = provisional.count(static_cast<int>(i)) > 0;
      o << "<polygon points=\"" << poly(ps) << "\" fill=\""
        << (fund ? style.fundamental_fill : "none") << "\" fill-opacity=\"0.5\" stroke=\""
        << (prov ? style.provisional_stroke : style.cell_stroke) << "\" stroke-width=\"0.8\"/>\n";
    }
  }
  for (const auto& p : points) {
    if (chart.ell.dot(p) <= 0) continue;
    const auto q = to2(p);
    o << "<circle cx=\"" << sx(q) << "\" cy=\"" << sy(q) << "\" r=\"1.5\" fill=\"" << style.orbit
      << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace projcell::svg
