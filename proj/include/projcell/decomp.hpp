#pragma once

// The cusp-orbit convex hull pipeline: lift parabolic fixed points to the
// cone boundary, hull their orbit, certify facets, projectivize, classify
// cells up to the group action and recover face pairings. Also the
// horoball and orbit diagnostics.

#include "projcell/cone.hpp"
#include "projcell/group.hpp"
#include "projcell/hull.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace projcell {

struct CuspDatum {
  std::string name;
  std::vector<std::string> words;
  Vec point;   // canonical representative of p, oriented into the cone closure
  Vec lift;    // scale * point
  double scale = 1.0;
  Vec phi;     // unit covector, zero at p, positive on the cone, fixed by the dual action
  Mat translations;  // columns: translation of each cusp word in cusp coordinates
  Mat basis;         // orthonormal basis of span{p, phi}^perp
  std::vector<int> lattice;  // indices of cusp words forming a lattice basis
};

struct PoolVertex {
  Vec lift;
  std::string word;
  int cusp = 0;
};

struct Cell {
  int dim = 0;
  std::vector<int> vertices;  // sorted ids into CellDecomposition::vertices
  int cls = -1;
  bool certified = false;
  Vec normal;  // supporting functional of the hull facet (top cells)
  double offset = 0.0;
  double required_radius = 0.0;
  std::vector<int> faces;  // proper faces (certified top cells)
};

/// `word` maps cell `from` onto cell `to`; the image of from.vertices[i] is
/// to.vertices[vertex_map[i]].
struct CellPairing {
  int from = -1;
  int to = -1;
  int dim = 0;
  std::string word;
  std::vector<int> vertex_map;
};

/// Boundary faces of the fundamental polytope: `word` maps `face` (on
/// `cell`) onto `partner` (on `partner_cell`).
struct FacePairing {
  int face = -1;
  int partner = -1;
  int cell = -1;
  int partner_cell = -1;
  std::string word;
  std::vector<int> vertex_map;
};

struct FundamentalPolytope {
  std::vector<int> cells;
  std::vector<FacePairing> pairings;
  std::vector<int> interior_faces;
  bool complete = false;
  std::vector<std::string> issues;
};

struct CellDecomposition {
  int dim = 0;  // n + 1
  int word_length = 0;
  std::vector<CuspDatum> cusps;
  std::vector<PoolVertex> vertices;
  std::vector<Cell> cells;
  std::vector<CellPairing> pairings;
  std::vector<int> quotient_counts;  // by cell dimension 0..n
  std::vector<int> provisional;      // uncertified top cells
  FundamentalPolytope fundamental;
  double radius_used = 0.0;
  double max_required_radius = 0.0;  // over certified cells
  std::size_t orbit_points = 0;      // pooled points before truncation
  Chart chart;
  Representation representation;

  std::vector<int> certified_top_cells() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i)
      if (cells[i].certified && cells[i].dim == dim - 1) out.push_back(i);
    return out;
  }
  bool fully_certified() const { return !certified_top_cells().empty() && fundamental.complete; }
  int euler_characteristic() const {
    int chi = 0;
    for (std::size_t d = 0; d < quotient_counts.size(); ++d)
      chi += (d % 2 == 0 ? 1 : -1) * quotient_counts[d];
    return chi;
  }
  std::vector<Vec> cell_vectors(int c) const {
    std::vector<Vec> out;
    for (int v : cells[c].vertices) out.push_back(vertices[v].lift);
    return out;
  }
};

class CuspValidationError : public Error {
 public:
  using Error::Error;
};

class ShallowEnumeration : public Error {
 public:
  ShallowEnumeration(const std::string& what, double max_required,
                     std::shared_ptr<CellDecomposition> partial)
      : Error(what), max_required_(max_required), partial_(std::move(partial)) {}
  double max_required_radius() const { return max_required_; }
  const std::shared_ptr<CellDecomposition>& partial() const { return partial_; }

 private:
  double max_required_;
  std::shared_ptr<CellDecomposition> partial_;
};

struct DecomposeOptions {
  double max_matrix_norm = 1e3;
  Tolerances tol;
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

/// Sign of a cone-preserving matrix chosen so it maps the cone to itself.
inline Mat orient_matrix(const ConeModel& cone, const Mat& m) {
  const Vec x = cone.interior_point();
  return cone.margin(m * x) >= 0 ? m : Mat(-m);
}

inline Mat oriented_eval(const Representation& rep, const ConeModel& cone, const std::string& w) {
  return orient_matrix(cone, rep.eval(w));
}

namespace detail {

inline bool same_vector(const Vec& a, const Vec& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol * std::max(1.0, b.cwiseAbs().maxCoeff());
}

// map[i] = j with a[i] ~ b[j], or nullopt
inline std::optional<std::vector<int>> match_vectors(const std::vector<Vec>& a,
                                                     const std::vector<Vec>& b, double tol) {
  if (a.size() != b.size()) return std::nullopt;
  std::vector<int> map(a.size(), -1);
  std::vector<char> used(b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && same_vector(a[i], b[j], tol)) {
        map[i] = static_cast<int>(j);
        used[j] = 1;
        break;
      }
    }
    if (map[i] < 0) return std::nullopt;
  }
  return map;
}

}  // namespace detail

/// Cusp data for every cusp of the representation: validated fixed points,
/// cone-oriented lifts at the given scales and invariant functionals.
inline std::vector<CuspDatum> cusp_data(const Representation& rep, const ConeModel& cone,
                                        std::vector<double> scales, const Tolerances& tol = {}) {
  const auto& cusps = rep.cusps();
  if (cusps.empty()) throw CuspValidationError("representation has no cusps");
  if (cone.dim() != rep.dim()) throw Error("cone and representation dimensions differ");
  if (scales.empty()) scales.assign(cusps.size(), 1.0);
  if (scales.size() != cusps.size()) throw Error("need one scale per cusp");
  for (double s : scales)
    if (!(s > 0) || !std::isfinite(s)) throw Error("scales must be positive");
  if (cusps.size() >= 2) {
    double mean = 0;
    for (double s : scales) mean += std::log(s);
    mean /= static_cast<double>(scales.size());
    for (double& s : scales) s = std::exp(std::log(s) - mean);
  }
  const int N = rep.dim();
  const Vec xint = cone.interior_point();
  std::vector<CuspDatum> out;
  for (std::size_t i = 0; i < cusps.size(); ++i) {
    CuspReport r = validate_cusp(rep, cusps[i]);
    if (!r.ok()) {
      std::string msg = "cusp validation failed:";
      for (const auto& v : r.violations) msg += " " + v + ";";
      throw CuspValidationError(msg);
    }
    CuspDatum d;
    d.name = cusps[i].name;
    d.words = cusps[i].words;
    Vec p = r.fixed_point->coords();
    try {
      p = cone.orient(p, Tolerances{tol.eps_equal, 1e-5, tol.eps_eig});
    } catch (const OutsideCone&) {
      throw CuspValidationError("fixed point of cusp " + d.name + " is not on the cone boundary");
    }
    if (std::abs(cone.margin(p)) > 1e-5)
      throw CuspValidationError("fixed point of cusp " + d.name + " is not on the cone boundary");
    d.point = p;
    d.scale = scales[i];
    d.lift = scales[i] * p;
    Vec phi = r.phi->normalized();
    if (phi.dot(xint) < 0) phi = -phi;
    d.phi = phi;
    Mat sp(N, 2);
    sp.col(0) = p.normalized();
    sp.col(1) = phi;
    d.basis = linalg::complement(sp);
    // translations in cusp coordinates c(x) = D^T x / phi(x)
    auto coord = [&](const Vec& x) { return Vec(d.basis.transpose() * x / phi.dot(x)); };
    std::vector<Vec> tests{xint, (xint + 0.5 * cone.boundary_samples(7)[3]).eval(),
                           (xint + 0.3 * cone.boundary_samples(11)[5]).eval()};
    d.translations = Mat(N - 2, d.words.size());
    for (std::size_t j = 0; j < d.words.size(); ++j) {
      Mat g = oriented_eval(rep, cone, d.words[j]);
      Vec t0 = coord(g * tests[0]) - coord(tests[0]);
      for (std::size_t k = 1; k < tests.size(); ++k) {
        Vec tk = coord(g * tests[k]) - coord(tests[k]);
        if ((tk - t0).norm() > 1e-6 * std::max(1.0, t0.norm()))
          throw CuspValidationError("cusp " + d.name + " does not act by translations");
      }
      d.translations.col(j) = t0;
    }
    // lattice basis: greedy independent subset of size n - 1
    Mat chosen(N - 2, 0);
    for (int j = 0; j < static_cast<int>(d.words.size()); ++j) {
      Mat trial(N - 2, chosen.cols() + 1);
      trial << chosen, d.translations.col(j);
      if (linalg::rank(trial, 1e-8 * std::max(1.0, trial.norm())) == trial.cols()) {
        chosen = trial;
        d.lattice.push_back(j);
      }
    }
    if (static_cast<int>(d.lattice.size()) != N - 2)
      throw CuspValidationError("cusp " + d.name + " translations do not span a lattice of rank " +
                                std::to_string(N - 2));
    Mat T = chosen;
    for (int j = 0; j < static_cast<int>(d.words.size()); ++j) {
      Vec k = T.fullPivLu().solve(Vec(d.translations.col(j)));
      if ((k - k.array().round().matrix()).cwiseAbs().maxCoeff() > 1e-6)
        throw CuspValidationError("cusp " + d.name + " translations are not a lattice");
    }
    out.push_back(std::move(d));
  }
  return out;
}

namespace detail {

struct CellCopy {
  int cusp = -1;
  std::vector<Vec> others;  // normalized vertex vectors other than the cusp point
  Vec centroid;             // cusp coordinates of `others`' mean
  std::string word;         // W: cell = W . copy
  int vertex = -1;          // decomposition vertex sent to the cusp point
};

class Classifier {
 public:
  Classifier(const Representation& rep, const ConeModel& cone, const std::vector<CuspDatum>& cusps,
             const std::vector<PoolVertex>& verts)
      : rep_(rep), cone_(cone), cusps_(cusps), verts_(verts) {
    for (const auto& c : cusps_) {
      std::vector<Mat> g;
      for (int j : c.lattice) g.push_back(oriented_eval(rep_, cone_, c.words[j]));
      lattice_mats_.push_back(g);
      Mat T(c.translations.rows(), c.lattice.size());
      for (std::size_t k = 0; k < c.lattice.size(); ++k) T.col(k) = c.translations.col(c.lattice[k]);
      lattice_inv_.push_back(T.rows() ? Mat(T.inverse()) : Mat(0, 0));
    }
  }

  CellCopy copy(const std::vector<int>& cell, int vertex) const {
    CellCopy cp;
    const auto& pv = verts_[vertex];
    cp.cusp = pv.cusp;
    cp.word = pv.word;
    cp.vertex = vertex;
    const CuspDatum& c = cusps_[pv.cusp];
    Mat winv = oriented_eval(rep_, cone_, word::inverse(pv.word));
    const int m = static_cast<int>(c.basis.cols());
    cp.centroid = Vec::Zero(m);
    for (int u : cell) {
      if (u == vertex) continue;
      Vec x = winv * verts_[u].lift;
      cp.others.push_back(x);
      cp.centroid += c.basis.transpose() * x / c.phi.dot(x);
    }
    if (!cp.others.empty()) cp.centroid /= static_cast<double>(cp.others.size());
    return cp;
  }

  // Word g with g . (cell of a) = (cell of b), if the copies differ by a
  // cusp-lattice element.
  std::optional<std::string> relate(const CellCopy& a, const CellCopy& b) const {
    if (a.cusp != b.cusp || a.others.size() != b.others.size()) return std::nullopt;
    const CuspDatum& c = cusps_[a.cusp];
    const int m = static_cast<int>(c.basis.cols());
    Vec k = Vec::Zero(m);
    if (m > 0 && !a.others.empty()) {
      k = lattice_inv_[a.cusp] * (b.centroid - a.centroid);
      if ((k - k.array().round().matrix()).cwiseAbs().maxCoeff() > 1e-5) return std::nullopt;
      k = k.array().round().matrix();
    }
    const int N = rep_.dim();
    Mat H = Mat::Identity(N, N);
    std::string hword;
    for (int j = 0; j < m; ++j) {
      const long e = std::lround(k(j));
      if (e == 0) continue;
      const Mat& g = lattice_mats_[a.cusp][j];
      Mat gp = e > 0 ? g : Mat(g.inverse());
      for (long s = 0; s < std::labs(e); ++s) H = H * gp;
      hword += word::power(c.words[c.lattice[j]], e);
    }
    std::vector<Vec> moved;
    for (const auto& x : a.others) moved.push_back(H * x);
    if (!match_vectors(moved, b.others, 1e-7)) return std::nullopt;
    return word::reduce(b.word + hword + word::inverse(a.word));
  }

 private:
  const Representation& rep_;
  const ConeModel& cone_;
  const std::vector<CuspDatum>& cusps_;
  const std::vector<PoolVertex>& verts_;
  std::vector<std::vector<Mat>> lattice_mats_;
  std::vector<Mat> lattice_inv_;
};

}  // namespace detail

/// Recomputes every pairing word on the vertex vectors; returns messages for
/// pairings that fail to map vertices onto their partners.
inline std::vector<std::string> verify_pairings(const CellDecomposition& dec,
                                                const Representation& rep, const ConeModel& cone,
                                                double tol = 1e-7) {
  std::vector<std::string> issues;
  auto check = [&](int from, int to, const std::string& w, const std::vector<int>& vmap,
                   const std::string& what) {
    Mat g = oriented_eval(rep, cone, w);
    const auto& a = dec.cells[from].vertices;
    const auto& b = dec.cells[to].vertices;
    if (a.size() != b.size() || vmap.size() != a.size()) {
      issues.push_back(what + ": vertex count mismatch");
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      Vec img = g * dec.vertices[a[i]].lift;
      if (!detail::same_vector(img, dec.vertices[b[vmap[i]]].lift, tol)) {
        issues.push_back(what + " with word '" + w + "' does not map cell " +
                         std::to_string(from) + " onto cell " + std::to_string(to));
        return;
      }
    }
  };
  for (const auto& p : dec.pairings) check(p.from, p.to, p.word, p.vertex_map, "pairing");
  for (const auto& p : dec.fundamental.pairings)
    check(p.face, p.partner, p.word, p.vertex_map, "face pairing");
  return issues;
}

namespace detail {

inline void assemble_fundamental(CellDecomposition& dec, const Representation& rep,
                                 const ConeModel& cone,
                                 const std::vector<std::string>& word_from_base) {
  FundamentalPolytope& fp = dec.fundamental;
  const int n = dec.dim - 1;
  auto tops = dec.certified_top_cells();
  if (tops.empty()) return;
  // codim-1 face -> certified top cells containing it
  std::map<int, std::vector<int>> incident;
  for (int c : tops)
    for (int f : dec.cells[c].faces)
      if (dec.cells[f].dim == n - 1) incident[f].push_back(c);

  // grow from the innermost cell, always adding the innermost new class
  auto depth = [&](int c) {
    double m = 0;
    for (int v : dec.cells[c].vertices) m = std::max(m, dec.vertices[v].lift.norm());
    return m;
  };
  int start = tops.front();
  for (int c : tops)
    if (depth(c) < depth(start)) start = c;
  std::set<int> classes_in{dec.cells[start].cls};
  std::vector<int> chosen{start};
  while (true) {
    int best = -1;
    for (int c : chosen)
      for (int f : dec.cells[c].faces) {
        if (dec.cells[f].dim != n - 1) continue;
        for (int other : incident[f])
          if (!classes_in.count(dec.cells[other].cls) && (best < 0 || depth(other) < depth(best)))
            best = other;
      }
    if (best < 0) break;
    chosen.push_back(best);
    classes_in.insert(dec.cells[best].cls);
  }
  std::sort(chosen.begin(), chosen.end());
  fp.cells = chosen;
  std::map<int, int> class_rep;  // class -> chosen cell
  for (int c : chosen) class_rep[dec.cells[c].cls] = c;

  std::set<int> in_p(chosen.begin(), chosen.end());
  std::set<std::pair<int, int>> done;
  bool complete = true;
  for (int c : chosen) {
    for (int f : dec.cells[c].faces) {
      if (dec.cells[f].dim != n - 1) continue;
      const auto& inc = incident[f];
      int neighbor = -1;
      for (int o : inc)
        if (o != c) neighbor = o;
      if (neighbor < 0) {
        complete = false;
        fp.issues.push_back("face " + std::to_string(f) + " has no certified neighbor");
        continue;
      }
      if (in_p.count(neighbor)) {
        if (std::find(fp.interior_faces.begin(), fp.interior_faces.end(), f) ==
            fp.interior_faces.end())
          fp.interior_faces.push_back(f);
        continue;
      }
      const int rprime = class_rep.at(dec.cells[neighbor].cls);
      // g maps R' onto the neighbor
      std::string g = word::reduce(word_from_base[neighbor] + word::inverse(word_from_base[rprime]));
      Mat ginv = oriented_eval(rep, cone, word::inverse(g));
      std::vector<Vec> pre;
      for (int v : dec.cells[f].vertices) pre.push_back(ginv * dec.vertices[v].lift);
      int fprime = -1;
      std::vector<int> map_pre;
      for (int h : dec.cells[rprime].faces) {
        if (dec.cells[h].dim != n - 1) continue;
        std::vector<Vec> hv = dec.cell_vectors(h);
        auto m = match_vectors(hv, pre, 1e-7);
        if (m) {
          fprime = h;
          map_pre = *m;  // vertex i of F' maps to vertex map_pre[i] of F
          break;
        }
      }
      if (fprime < 0) {
        complete = false;
        fp.issues.push_back("no partner face for face " + std::to_string(f));
        continue;
      }
      if (done.count({f, fprime}) || done.count({fprime, f})) continue;
      done.insert({fprime, f});
      FacePairing pr;
      pr.face = fprime;
      pr.partner = f;
      pr.cell = rprime;
      pr.partner_cell = c;
      pr.word = g;
      pr.vertex_map = map_pre;
      fp.pairings.push_back(pr);
    }
  }
  std::sort(fp.interior_faces.begin(), fp.interior_faces.end());
  // every top class must be represented
  std::set<int> all_classes;
  for (int c : tops) all_classes.insert(dec.cells[c].cls);
  if (all_classes.size() != classes_in.size()) {
    complete = false;
    fp.issues.push_back("certified cells are not connected across faces");
  }
  fp.complete = complete;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Cells of the orbit-hull decomposition. Top cells come from hull facets
/// with positive offset; a facet is certified when its required radius does
/// not exceed the enumeration radius. Throws ShallowEnumeration (carrying
/// the partial result) when no facet is certified.
inline CellDecomposition epstein_penner(const Representation& rep, const ConeModel& cone,
                                        const std::vector<double>& scales, int word_length,
                                        const DecomposeOptions& opt = {}) {
  const Tolerances& tol = opt.tol;
  tol.validate();
  if (word_length < 1) throw Error("word length must be at least 1");
  CellDecomposition dec;
  dec.dim = rep.dim();
  dec.word_length = word_length;
  dec.chart = cone.chart();
  dec.representation = rep;
  dec.cusps = cusp_data(rep, cone, scales, tol);
  const int N = dec.dim;

  Enumeration en = enumerate_elements(rep, word_length, opt.max_matrix_norm);
  std::vector<GroupElement> els = en.elements;
  for (auto& e : els) e.matrix = orient_matrix(cone, e.matrix);
  const std::size_t last_start = en.layer_start[en.layer_start.size() - 2];

  // pool of orbit points, recording the first word reaching each
  std::vector<PoolVertex> pool;
  double radius = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(dec.cusps.size()); ++c) {
    const Vec& lift = dec.cusps[c].lift;
    std::vector<GroupElement> early(els.begin(), els.begin() + last_start);
    auto inner = orbit(lift, early, tol);
    auto full = orbit(lift, els, tol);
    for (std::size_t i = inner.size(); i < full.size(); ++i)
      radius = std::min(radius, full[i].x.norm());
    for (const auto& e : en.pruned) {
      Vec x = orient_matrix(cone, e.matrix) * lift;
      bool known = false;
      for (const auto& o : full)
        if (detail::same_vector(x, o.x, 1e-9)) {
          known = true;
          break;
        }
      if (!known) radius = std::min(radius, x.norm());
    }
    for (auto& o : full) pool.push_back({o.x, o.word, c});
  }
  dec.orbit_points = pool.size();
  dec.radius_used = radius;

  std::vector<PoolVertex> kept;
  for (auto& p : pool)
    if (p.lift.norm() <= radius * (1 + 1e-12)) kept.push_back(p);
  std::vector<Vec> pts;
  for (auto& p : kept) pts.push_back(p.lift);

  HullComplex hull;
  try {
    hull = incremental_hull(pts, tol.eps_geom);
  } catch (const DegenerateInput& e) {
    throw ShallowEnumeration(std::string("enumeration too shallow: ") + e.what(),
                             std::numeric_limits<double>::infinity(), nullptr);
  }
  const bool orbit_hull_cone = cone.variant() == ConeVariant::OrbitHull;
  auto certs = stable_facets(
      hull,
      [&](const Vec& psi) {
        double m = cone.min_unit_boundary(psi);
        return (orbit_hull_cone && m > 0) ? 0.9 * m : m;
      },
      radius);

  // keep only pool vertices used by positive facets; remap ids
  std::map<int, int> remap;
  std::vector<int> top_facets;
  for (int f = 0; f < static_cast<int>(hull.facets.size()); ++f)
    if (hull.facets[f].offset > hull.tolerance) top_facets.push_back(f);
  // certified first so their ids are small
  std::stable_sort(top_facets.begin(), top_facets.end(),
                   [&](int a, int b) { return certs[a].valid() > certs[b].valid(); });
  auto vid = [&](int pool_id) {
    auto it = remap.find(pool_id);
    if (it != remap.end()) return it->second;
    const int id = static_cast<int>(dec.vertices.size());
    remap.emplace(pool_id, id);
    dec.vertices.push_back(kept[pool_id]);
    return id;
  };
  double max_req_all = 0.0;
  for (int f : top_facets) {
    Cell cell;
    cell.dim = N - 1;  // hull facets are n-dimensional
    for (int v : hull.facets[f].vertices) cell.vertices.push_back(vid(v));
    std::sort(cell.vertices.begin(), cell.vertices.end());
    cell.normal = hull.facets[f].normal;
    cell.offset = hull.facets[f].offset;
    cell.required_radius = certs[f].required_radius;
    cell.certified = certs[f].valid();
    if (std::isfinite(cell.required_radius)) max_req_all = std::max(max_req_all, cell.required_radius);
    if (cell.certified)
      dec.max_required_radius = std::max(dec.max_required_radius, cell.required_radius);
    else
      dec.provisional.push_back(static_cast<int>(dec.cells.size()));
    dec.cells.push_back(std::move(cell));
  }

  const auto tops = dec.certified_top_cells();
  if (tops.empty()) {
    auto partial = std::make_shared<CellDecomposition>(dec);
    partial->quotient_counts.assign(N, 0);
    throw ShallowEnumeration(
        "enumeration too shallow: no certified facet (max required radius " +
            std::to_string(max_req_all) + ", radius used " + std::to_string(radius) + ")",
        max_req_all, partial);
  }

  // faces of certified top cells
  std::map<std::vector<int>, int> face_id;
  for (int c : tops) face_id[dec.cells[c].vertices] = c;
  for (int c : tops) {
    std::vector<Vec> vs = dec.cell_vectors(c);
    const auto verts = dec.cells[c].vertices;
    for (const auto& f : polytope_faces(vs, 1e-9)) {
      if (f.dim >= N - 1) continue;
      std::vector<int> ids;
      for (int k : f.vertices) ids.push_back(verts[k]);
      std::sort(ids.begin(), ids.end());
      auto it = face_id.find(ids);
      int id;
      if (it == face_id.end()) {
        id = static_cast<int>(dec.cells.size());
        Cell fc;
        fc.dim = f.dim;
        fc.vertices = ids;
        fc.certified = true;
        dec.cells.push_back(fc);
        face_id.emplace(ids, id);
      } else {
        id = it->second;
      }
      if (id != c) dec.cells[c].faces.push_back(id);
    }
    std::sort(dec.cells[c].faces.begin(), dec.cells[c].faces.end());
  }

  // group-orbit classes and pairing words
  detail::Classifier cls(rep, cone, dec.cusps, dec.vertices);
  std::vector<std::string> word_from_base(dec.cells.size());
  std::vector<int> class_dim;
  for (int d = 0; d <= N - 1; ++d) {
    std::vector<int> members;
    for (int c = 0; c < static_cast<int>(dec.cells.size()); ++c)
      if (dec.cells[c].dim == d && dec.cells[c].certified) members.push_back(c);
    std::vector<std::vector<detail::CellCopy>> copies(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      for (int v : dec.cells[members[i]].vertices)
        copies[i].push_back(cls.copy(dec.cells[members[i]].vertices, v));
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int a = members[i];
      if (dec.cells[a].cls >= 0) continue;
      const int id = static_cast<int>(class_dim.size());
      class_dim.push_back(d);
      dec.cells[a].cls = id;
      word_from_base[a] = "";
      const auto& ref = copies[i][0];
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const int b = members[j];
        if (dec.cells[b].cls >= 0) continue;
        for (const auto& cb : copies[j]) {
          auto w = cls.relate(ref, cb);
          if (!w) continue;
          dec.cells[b].cls = id;
          word_from_base[b] = *w;
          CellPairing p;
          p.from = a;
          p.to = b;
          p.dim = d;
          p.word = *w;
          Mat g = oriented_eval(rep, cone, *w);
          std::vector<Vec> img;
          for (int v : dec.cells[a].vertices) img.push_back(g * dec.vertices[v].lift);
          auto m = detail::match_vectors(img, dec.cell_vectors(b), 1e-7);
          if (!m) throw Error("pairing word failed to map cell vertices");
          p.vertex_map = *m;
          dec.pairings.push_back(std::move(p));
          break;
        }
      }
    }
  }
  dec.quotient_counts.assign(N, 0);
  for (int d : class_dim) dec.quotient_counts[d] += 1;

  detail::assemble_fundamental(dec, rep, cone, word_from_base);
  return dec;
}

/// One-cusp entry point: decomposes at scale 1 and checks the result is
/// unchanged at `alt_scale`.
inline CellDecomposition canonical_one_cusp(const Representation& rep, const ConeModel& cone,
                                            int word_length, double alt_scale = 2.0,
                                            const DecomposeOptions& opt = {});

struct CombinatorialComparison {
  bool same = false;
  double max_vertex_distance = 0.0;  // projective, over matched certified cells
  std::string reason;
};

/// Compares certified cells of two decompositions by their projectivized
/// vertex sets.
inline CombinatorialComparison compare_decompositions(const CellDecomposition& a,
                                                      const CellDecomposition& b,
                                                      double tol = 1e-6) {
  CombinatorialComparison out;
  if (a.quotient_counts != b.quotient_counts) {
    out.reason = "quotient counts differ";
    return out;
  }
  auto ta = a.certified_top_cells();
  auto tb = b.certified_top_cells();
  if (ta.size() != tb.size()) {
    out.reason = "different numbers of certified cells";
    return out;
  }
  std::vector<char> used(tb.size(), 0);
  for (int ca : ta) {
    bool found = false;
    for (std::size_t j = 0; j < tb.size() && !found; ++j) {
      if (used[j]) continue;
      const auto& va = a.cells[ca].vertices;
      const auto& vb = b.cells[tb[j]].vertices;
      if (va.size() != vb.size()) continue;
      double worst = 0;
      bool ok = true;
      for (int x : va) {
        double best = std::numeric_limits<double>::infinity();
        for (int y : vb)
          best = std::min(best, projective_distance(a.vertices[x].lift, b.vertices[y].lift));
        worst = std::max(worst, best);
        if (best > tol) {
          ok = false;
          break;
        }
      }
      if (ok) {
        used[j] = 1;
        found = true;
        out.max_vertex_distance = std::max(out.max_vertex_distance, worst);
      }
    }
    if (!found) {
      out.reason = "certified cell " + std::to_string(ca) + " has no counterpart";
      return out;
    }
  }
  out.same = true;
  return out;
}

inline CellDecomposition canonical_one_cusp(const Representation& rep, const ConeModel& cone,
                                            int word_length, double alt_scale,
                                            const DecomposeOptions& opt) {
  if (rep.cusps().size() != 1)
    throw Error("canonical_one_cusp needs exactly one cusp; use epstein_penner with scales");
  CellDecomposition a = epstein_penner(rep, cone, {1.0}, word_length, opt);
  CellDecomposition b = epstein_penner(rep, cone, {alt_scale}, word_length, opt);
  auto cmp = compare_decompositions(a, b, 1e-9);
  if (!cmp.same) throw Error("decomposition changed under rescaling: " + cmp.reason);
  return a;
}

struct ContinuityReport {
  bool same_combinatorics = false;
  bool wall_crossed = false;
  double max_drift = 0.0;     // projective distance between corresponding vertices
  double perturbation = 0.0;  // generator distance
  double constant = 0.0;      // drift / perturbation
  std::string detail;
};

/// Runs the pipeline on two nearby representations and compares the
/// certified cells vertex by vertex, matching vertices through their words.
inline ContinuityReport continuity_probe(
    const Representation& rep0, const Representation& rep1,
    const std::function<ConeModel(const Representation&)>& cone_for, int word_length,
    const DecomposeOptions& opt = {}) {
  ContinuityReport r;
  r.perturbation = generator_distance(rep0, rep1);
  ConeModel c0 = cone_for(rep0), c1 = cone_for(rep1);
  std::vector<double> ones(rep0.cusps().size(), 1.0);
  CellDecomposition d0 = epstein_penner(rep0, c0, ones, word_length, opt);
  CellDecomposition d1 = epstein_penner(rep1, c1, ones, word_length, opt);
  // drift via words
  for (int c : d0.certified_top_cells()) {
    for (int v : d0.cells[c].vertices) {
      const auto& pv = d0.vertices[v];
      Vec x1 = oriented_eval(rep1, c1, pv.word) * d1.cusps[pv.cusp].lift;
      r.max_drift = std::max(r.max_drift, projective_distance(pv.lift, x1));
    }
  }
  auto cmp = compare_decompositions(d0, d1, std::max(1e-6, 10 * r.max_drift + 1e-9));
  r.same_combinatorics = cmp.same;
  r.wall_crossed = !cmp.same;
  r.detail = cmp.reason;
  r.constant = r.perturbation > 0 ? r.max_drift / r.perturbation : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Horoballs
// ---------------------------------------------------------------------------

namespace detail {

// min over the cone of eta(x) f(x)^{1/N}; eta interior to the dual cone.
inline double min_horofunction(const ConeModel& cone, const Chart& chart, const Vec& eta,
                               const Vec& start) {
  const int N = cone.dim();
  auto value = [&](const Vec& c, Vec* grad) -> double {
    Vec x = chart.from_chart(c);
    if (!cone.contains(x)) return std::numeric_limits<double>::infinity();
    CharFunctionValue fv;
    try {
      fv = cone.char_function(x);
    } catch (const OutsideCone&) {
      return std::numeric_limits<double>::infinity();
    }
    const double e = eta.dot(x);
    if (e <= 0) return std::numeric_limits<double>::infinity();
    if (grad) {
      Vec gx = eta / e + fv.gradient / (N * fv.value);
      *grad = chart.basis.transpose() * gx;
    }
    return std::log(e) + std::log(fv.value) / N;
  };
  Vec c = chart.to_chart(start);
  Vec g;
  double v = value(c, &g);
  const int m = static_cast<int>(c.size());
  Mat Hinv = Mat::Identity(m, m) * 1e-2;
  for (int it = 0; it < 500; ++it) {
    if (g.norm() < 1e-13) break;
    Vec dir = -Hinv * g;
    if (dir.dot(g) >= 0) {
      Hinv = Mat::Identity(m, m) * 1e-2;
      dir = -Hinv * g;
    }
    double step = 1.0;
    Vec cn, gn;
    double vn = std::numeric_limits<double>::infinity();
    for (int ls = 0; ls < 60; ++ls) {
      cn = c + step * dir;
      vn = value(cn, &gn);
      if (std::isfinite(vn) && vn <= v + 1e-4 * step * g.dot(dir)) break;
      step *= 0.5;
    }
    if (!std::isfinite(vn) || vn > v) break;
    Vec s = cn - c, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      Mat I = Mat::Identity(m, m);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    const bool small = std::abs(v - vn) < 1e-16 * std::max(1.0, std::abs(v));
    c = cn;
    g = gn;
    v = vn;
    if (small) break;
  }
  return std::exp(v);
}

}  // namespace detail

/// Level at which the horoballs B(phi, t) and B(psi, t) start to meet:
/// min over x of max(h_phi, h_psi), computed as the maximum over lambda of
/// min_x h_{lambda phi + (1 - lambda) psi}.
inline double horoball_contact_level(const ConeModel& cone, const Vec& phi, const Vec& psi,
                                     const Vec& p, const Vec& q) {
  const Chart chart = cone.chart();
  Vec start = p.normalized() + q.normalized();
  if (!cone.contains(start)) start = cone.interior_point();
  auto m = [&](double lam) {
    Vec eta = lam * phi + (1 - lam) * psi;
    return detail::min_horofunction(cone, chart, eta, start);
  };
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double a = 1e-9, b = 1 - 1e-9;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = m(x1), f2 = m(x2);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = m(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = m(x1);
    }
  }
  return std::max(f1, f2);
}

struct InvariantLevel {
  double t = 0.0;
  std::string word;          // coset representative attaining the minimum
  std::size_t candidates = 0;
  Vec phi;
};

/// Largest t for which B(phi, t) is disjoint from all its images under the
/// enumerated elements that move the cusp point.
inline InvariantLevel precisely_invariant_level(const Representation& rep, const ConeModel& cone,
                                                int cusp_index, int word_length = 4,
                                                double phi_scale = 1.0,
                                                const Tolerances& tol = {}) {
  auto cusps = cusp_data(rep, cone, {}, tol);
  if (cusp_index < 0 || cusp_index >= static_cast<int>(cusps.size()))
    throw Error("cusp index out of range");
  const CuspDatum& c = cusps[cusp_index];
  const Vec phi = phi_scale * c.phi;
  Enumeration en = enumerate_elements(rep, word_length, 1e6);
  std::vector<Vec> seen;
  InvariantLevel out;
  out.phi = phi;
  out.t = std::numeric_limits<double>::infinity();
  for (const auto& e : en.elements) {
    Mat g = orient_matrix(cone, e.matrix);
    Vec q = g * c.point;
    if (projective_distance(q, c.point) < 1e-9) continue;
    Vec psi = dual_action(g, DualFunctional(phi), tol).covector();
    bool dup = false;
    for (const auto& s : seen)
      if (detail::same_vector(psi, s, 1e-9)) {
        dup = true;
        break;
      }
    if (dup) continue;
    seen.push_back(psi);
    const double t = horoball_contact_level(cone, phi, psi, c.point, q);
    if (t < out.t) {
      out.t = t;
      out.word = e.word;
    }
  }
  out.candidates = seen.size();
  if (seen.empty()) throw Error("no enumerated coset representative moves the cusp point");
  return out;
}

// ---------------------------------------------------------------------------
// Orbit diagnostics
// ---------------------------------------------------------------------------

struct OrbitReport {
  std::vector<OrbitPoint> points;
  double min_pairwise = 0.0;  // Euclidean, among points of norm <= radius
  double seed_norm = 0.0;
  double min_norm = 0.0;
  double max_norm = 0.0;
  double min_norm_ratio = 0.0;  // min_norm / seed_norm
};

inline double min_pairwise_distance(const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, (pts[i] - pts[j]).norm());
  return best;
}

/// Orbit of a seed vector with discreteness and accumulation statistics.
inline OrbitReport orbit_report(const Representation& rep, const ConeModel& cone, const Vec& seed,
                                int word_length, double max_matrix_norm = 1e3,
                                double radius = std::numeric_limits<double>::infinity(),
                                const Tolerances& tol = {}) {
  if (!cone.contains_closure(seed, tol) && !cone.contains_closure(-seed, tol))
    throw OutsideCone("seed is outside the cone closure");
  Vec s = cone.contains_closure(seed, tol) ? seed : Vec(-seed);
  Enumeration en = enumerate_elements(rep, word_length, max_matrix_norm);
  for (auto& e : en.elements) e.matrix = orient_matrix(cone, e.matrix);
  OrbitReport r;
  r.points = orbit(s, en.elements, tol);
  r.seed_norm = s.norm();
  r.min_norm = std::numeric_limits<double>::infinity();
  std::vector<Vec> near;
  for (const auto& p : r.points) {
    const double nn = p.x.norm();
    r.min_norm = std::min(r.min_norm, nn);
    r.max_norm = std::max(r.max_norm, nn);
    if (nn <= radius) near.push_back(p.x);
  }
  r.min_pairwise = near.size() >= 2 ? min_pairwise_distance(near) : 0.0;
  r.min_norm_ratio = r.min_norm / r.seed_norm;
  return r;
}

struct DensityEstimate {
  double hausdorff = 0.0;
  std::size_t orbit_size = 0;
  std::size_t samples = 0;
};

/// One-sided Hausdorff distance, in the cone's affine chart, from sampled
/// boundary points to the projectivized orbit of a boundary seed.
inline DensityEstimate density_probe(const Representation& rep, const ConeModel& cone,
                                     const Vec& seed, int word_length, int samples = 2000,
                                     double max_matrix_norm = 1e4, const Tolerances& tol = {}) {
  if (!cone.on_boundary(seed, Tolerances{tol.eps_equal, 1e-6, tol.eps_eig}))
    throw Error("density seed must lie on the cone boundary");
  const Chart chart = cone.chart();
  Enumeration en = enumerate_elements(rep, word_length, max_matrix_norm);
  std::vector<Vec> orbit_chart;
  for (const auto& e : en.elements) {
    Vec x = orient_matrix(cone, e.matrix) * cone.orient(seed, Tolerances{1e-9, 1e-6, 1e-6});
    orbit_chart.push_back(chart.to_chart(x));
  }
  DensityEstimate d;
  d.orbit_size = orbit_chart.size();
  auto bs = cone.boundary_samples(samples);
  d.samples = bs.size();
  for (const auto& b : bs) {
    Vec cb = chart.to_chart(b);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : orbit_chart) best = std::min(best, (cb - o).squaredNorm());
    d.hausdorff = std::max(d.hausdorff, std::sqrt(best));
  }
  return d;
}

}  // namespace projcell
