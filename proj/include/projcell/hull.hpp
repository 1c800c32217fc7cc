#pragma once

// Convex hulls in R^d (2 <= d <= 6) with coplanar-facet merging, the face
// lattice of small polytopes, pulling triangulations, and the stability
// certificate that tells which facets of an orbit hull cannot be cut by
// orbit points that were never enumerated.

#include "projcell/core.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

namespace projcell {

struct HullFacet {
  Vec normal;           // unit covector psi
  double offset = 0.0;  // K: psi(x) >= K on every input point, equality on the facet
  std::vector<int> vertices;  // sorted indices into HullComplex::points
};

struct HullComplex {
  int dim = 0;
  std::vector<Vec> points;
  std::vector<int> vertex_ids;  // points that are hull vertices, sorted
  std::vector<HullFacet> facets;
  std::vector<std::pair<int, int>> adjacency;  // facets sharing a ridge, i < j
  std::vector<std::vector<int>> simplices;     // simplicial facets before merging
  std::vector<int> simplex_facet;              // merged facet owning each simplex
  double tolerance = 0.0;                      // absolute distance tolerance used
};

struct StableFacetCertificate {
  int facet = -1;
  double margin = 0.0;           // delta: min of psi over unit boundary directions
  double required_radius = 0.0;  // K / delta
  double radius_used = 0.0;

  bool valid() const { return margin > 0.0 && radius_used >= required_radius; }
};

namespace detail {

using ld = long double;

// Determinant of a small square matrix (row-major, size k) by partial pivoting.
inline ld small_det(std::vector<ld> a, int k) {
  ld det = 1.0L;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r)
      if (std::fabs(a[r * k + c]) > std::fabs(a[piv * k + c])) piv = r;
    if (a[piv * k + c] == 0.0L) return 0.0L;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    det *= a[c * k + c];
    for (int r = c + 1; r < k; ++r) {
      ld f = a[r * k + c] / a[c * k + c];
      for (int j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

class Quickhull {
 public:
  Quickhull(const std::vector<Vec>& pts, double tol) : d_(0), npts_(pts.size()) {
    if (pts.empty()) throw Error("convex hull of an empty point set");
    d_ = static_cast<int>(pts.front().size());
    if (d_ < 2 || d_ > 8) throw Error("convex hull supports dimensions 2..8");
    xs_.resize(npts_ * d_);
    double scale = 1.0;
    for (std::size_t i = 0; i < npts_; ++i) {
      if (pts[i].size() != d_) throw Error("points of mixed dimension");
      if (!pts[i].allFinite()) throw Error("non-finite point in hull input");
      for (int j = 0; j < d_; ++j) {
        xs_[i * d_ + j] = pts[i](j);
        scale = std::max(scale, std::abs(pts[i](j)));
      }
    }
    tol_ = tol * scale;
  }

  double tolerance() const { return tol_; }

  void run() {
    if (npts_ < static_cast<std::size_t>(d_ + 1))
      throw DegenerateInput("need at least " + std::to_string(d_ + 1) + " points",
                            static_cast<int>(npts_) - 1);
    initial_simplex();
    std::vector<int> stack;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f)
      if (!faces_[f].outside.empty()) stack.push_back(f);
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f, stack);
    }
  }

  struct Face {
    std::vector<int> v;
    std::vector<int> nb;
    std::vector<ld> n;
    ld off = 0;
    std::vector<int> outside;
    int furthest = -1;
    ld furthest_dist = 0;
    bool alive = true;
    unsigned visit = 0;
  };

  int dim() const { return d_; }
  const std::vector<Face>& faces() const { return faces_; }
  const ld* x(int i) const { return &xs_[static_cast<std::size_t>(i) * d_]; }

  // positive when p lies strictly on the outer side of the face
  ld dist(const Face& f, int p) const {
    const ld* xp = x(p);
    ld s = 0;
    for (int j = 0; j < d_; ++j) s += f.n[j] * xp[j];
    return f.off - s;
  }

 private:
  void compute_plane(Face& f) const {
    const int k = d_ - 1;
    std::vector<ld> rows(static_cast<std::size_t>(k) * d_);
    const ld* x0 = x(f.v[0]);
    for (int r = 0; r < k; ++r) {
      const ld* xr = x(f.v[r + 1]);
      for (int j = 0; j < d_; ++j) rows[r * d_ + j] = xr[j] - x0[j];
    }
    f.n.assign(d_, 0.0L);
    std::vector<ld> minor(static_cast<std::size_t>(k) * k);
    for (int j = 0; j < d_; ++j) {
      for (int r = 0; r < k; ++r) {
        int cc = 0;
        for (int c = 0; c < d_; ++c) {
          if (c == j) continue;
          minor[r * k + cc++] = rows[r * d_ + c];
        }
      }
      ld m = small_det(minor, k);
      f.n[j] = (j % 2 == 0) ? m : -m;
    }
    ld len = 0;
    for (ld c : f.n) len += c * c;
    len = std::sqrt(len);
    if (len == 0.0L) throw DegenerateInput("degenerate facet in hull", d_ - 1);
    for (ld& c : f.n) c /= len;
    ld off = 0;
    for (int j = 0; j < d_; ++j) off += f.n[j] * x0[j];
    f.off = off;
    // orient: psi(interior) > K
    ld s = 0;
    for (int j = 0; j < d_; ++j) s += f.n[j] * interior_[j];
    if (s < f.off) {
      for (ld& c : f.n) c = -c;
      f.off = -f.off;
    }
  }

  void initial_simplex() {
    std::vector<int> chosen;
    // start from the point with the smallest first coordinate
    int p0 = 0;
    for (std::size_t i = 1; i < npts_; ++i)
      if (x(static_cast<int>(i))[0] < x(p0)[0]) p0 = static_cast<int>(i);
    chosen.push_back(p0);
    std::vector<std::vector<ld>> basis;  // orthonormal directions of the affine span
    for (int step = 0; step < d_; ++step) {
      ld best = -1;
      int besti = -1;
      std::vector<ld> bestr;
      for (std::size_t i = 0; i < npts_; ++i) {
        std::vector<ld> r(d_);
        for (int j = 0; j < d_; ++j) r[j] = x(static_cast<int>(i))[j] - x(p0)[j];
        for (const auto& b : basis) {
          ld dp = 0;
          for (int j = 0; j < d_; ++j) dp += r[j] * b[j];
          for (int j = 0; j < d_; ++j) r[j] -= dp * b[j];
        }
        ld nr = 0;
        for (ld c : r) nr += c * c;
        if (nr > best) {
          best = nr;
          besti = static_cast<int>(i);
          bestr = std::move(r);
        }
      }
      ld len = std::sqrt(best);
      if (len <= tol_) {
        throw DegenerateInput("point set is not full-dimensional (affine dimension " +
                                  std::to_string(step) + ")",
                              step);
      }
      for (ld& c : bestr) c /= len;
      basis.push_back(bestr);
      chosen.push_back(besti);
    }
    interior_.assign(d_, 0.0L);
    for (int c : chosen)
      for (int j = 0; j < d_; ++j) interior_[j] += x(c)[j] / static_cast<ld>(d_ + 1);

    // faces: face i omits chosen[i]
    faces_.clear();
    for (int i = 0; i <= d_; ++i) {
      Face f;
      for (int j = 0; j <= d_; ++j)
        if (j != i) f.v.push_back(chosen[j]);
      f.nb.assign(d_, -1);
      faces_.push_back(std::move(f));
    }
    for (int i = 0; i <= d_; ++i) {
      Face& f = faces_[i];
      for (int k = 0; k < d_; ++k) {
        // opposite f.v[k] is the face omitting f.v[k]
        int omitted = f.v[k];
        int j = static_cast<int>(std::find(chosen.begin(), chosen.end(), omitted) - chosen.begin());
        f.nb[k] = j;
      }
      compute_plane(f);
    }
    std::vector<char> used(npts_, 0);
    for (int c : chosen) used[c] = 1;
    for (std::size_t p = 0; p < npts_; ++p) {
      if (used[p]) continue;
      assign(static_cast<int>(p), 0, static_cast<int>(faces_.size()));
    }
  }

  // assign point p to a face in [lo, hi) that sees it; drop it otherwise
  void assign(int p, int lo, int hi) {
    for (int f = lo; f < hi; ++f) {
      Face& face = faces_[f];
      if (!face.alive) continue;
      ld dd = dist(face, p);
      if (dd > tol_) {
        face.outside.push_back(p);
        if (dd > face.furthest_dist) {
          face.furthest_dist = dd;
          face.furthest = p;
        }
        return;
      }
    }
  }

  void add_point(int f0, std::vector<int>& stack) {
    const int eye = faces_[f0].furthest;
    ++stamp_;
    std::vector<int> visible{f0};
    faces_[f0].visit = stamp_;
    std::vector<std::pair<int, int>> horizon;  // (visible face, index)
    for (std::size_t q = 0; q < visible.size(); ++q) {
      int f = visible[q];
      for (int k = 0; k < d_; ++k) {
        int nb = faces_[f].nb[k];
        if (faces_[nb].visit == stamp_) continue;
        if (dist(faces_[nb], eye) > tol_) {
          faces_[nb].visit = stamp_;
          visible.push_back(nb);
        }
      }
    }
    // horizon ridges: neighbors not marked visible
    for (int f : visible)
      for (int k = 0; k < d_; ++k)
        if (faces_[faces_[f].nb[k]].visit != stamp_) horizon.emplace_back(f, k);

    const int first_new = static_cast<int>(faces_.size());
    std::map<std::vector<int>, std::pair<int, int>> ridge_map;
    for (auto [f, k] : horizon) {
      Face nf;
      nf.v = faces_[f].v;
      nf.v[k] = eye;
      nf.nb.assign(d_, -1);
      int other = faces_[f].nb[k];
      nf.nb[k] = other;
      int self = static_cast<int>(faces_.size());
      for (int j = 0; j < d_; ++j)
        if (faces_[other].nb[j] == f) faces_[other].nb[j] = self;
      compute_plane(nf);
      for (int j = 0; j < d_; ++j) {
        if (j == k) continue;
        std::vector<int> key;
        key.reserve(d_ - 1);
        for (int t = 0; t < d_; ++t)
          if (t != j) key.push_back(nf.v[t]);
        std::sort(key.begin(), key.end());
        auto it = ridge_map.find(key);
        if (it == ridge_map.end()) {
          ridge_map.emplace(std::move(key), std::make_pair(self, j));
        } else {
          auto [of, oj] = it->second;
          nf.nb[j] = of;
          faces_[of].nb[oj] = self;
          ridge_map.erase(it);
        }
      }
      faces_.push_back(std::move(nf));
    }
    const int end_new = static_cast<int>(faces_.size());
    for (int f : visible) {
      faces_[f].alive = false;
      std::vector<int> pts;
      pts.swap(faces_[f].outside);
      for (int p : pts)
        if (p != eye) assign(p, first_new, end_new);
    }
    for (int f = first_new; f < end_new; ++f)
      if (!faces_[f].outside.empty()) stack.push_back(f);
  }

  int d_;
  std::size_t npts_;
  std::vector<ld> xs_;
  std::vector<ld> interior_;
  std::vector<Face> faces_;
  double tol_ = 0;
  unsigned stamp_ = 0;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// Convex hull of `points` (all facets). Adjacent simplicial facets whose
/// normals agree within 1e-6 rad and offsets within the tolerance are merged
/// into polytopal facets. `tol` is relative to the largest coordinate.
inline HullComplex incremental_hull(const std::vector<Vec>& points, double tol = 1e-7) {
  detail::Quickhull qh(points, tol);
  qh.run();
  const int d = qh.dim();
  const auto& faces = qh.faces();

  HullComplex out;
  out.dim = d;
  out.points = points;
  out.tolerance = qh.tolerance();

  std::vector<int> alive_index(faces.size(), -1);
  std::vector<int> alive;
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    if (faces[f].alive) {
      alive_index[f] = static_cast<int>(alive.size());
      alive.push_back(f);
    }
  }
  const int m = static_cast<int>(alive.size());
  auto normal_of = [&](int f) {
    Vec n(d);
    for (int j = 0; j < d; ++j) n(j) = static_cast<double>(faces[f].n[j]);
    return n;
  };

  constexpr double kMergeAngle = 1e-6;
  detail::UnionFind uf(m);
  for (int a = 0; a < m; ++a) {
    const auto& fa = faces[alive[a]];
    Vec na = normal_of(alive[a]);
    for (int nb : fa.nb) {
      int b = alive_index[nb];
      if (b < 0 || b <= a) continue;
      Vec nbv = normal_of(nb);
      double ang = projective_distance(na, nbv);
      if (na.dot(nbv) > 0 && ang < kMergeAngle &&
          std::abs(static_cast<double>(fa.off - faces[nb].off)) < out.tolerance)
        uf.unite(a, b);
    }
  }

  std::map<int, int> root_to_facet;
  std::vector<int> simplex_owner(m);
  for (int a = 0; a < m; ++a) {
    int r = uf.find(a);
    auto it = root_to_facet.find(r);
    if (it == root_to_facet.end()) {
      it = root_to_facet.emplace(r, static_cast<int>(out.facets.size())).first;
      out.facets.emplace_back();
    }
    simplex_owner[a] = it->second;
    auto& verts = out.facets[it->second].vertices;
    for (int v : faces[alive[a]].v) verts.push_back(v);
    std::vector<int> s = faces[alive[a]].v;
    std::sort(s.begin(), s.end());
    out.simplices.push_back(std::move(s));
  }
  out.simplex_facet = simplex_owner;

  // interior reference for orientation: centroid of all hull vertices
  std::set<int> vset;
  for (auto& f : out.facets) {
    std::sort(f.vertices.begin(), f.vertices.end());
    f.vertices.erase(std::unique(f.vertices.begin(), f.vertices.end()), f.vertices.end());
    vset.insert(f.vertices.begin(), f.vertices.end());
  }
  out.vertex_ids.assign(vset.begin(), vset.end());
  Vec interior = Vec::Zero(d);
  for (int v : out.vertex_ids) interior += points[v];
  interior /= static_cast<double>(out.vertex_ids.size());

  for (int fi = 0; fi < static_cast<int>(out.facets.size()); ++fi) {
    auto& f = out.facets[fi];
    // pick the normal of a constituent simplex, then refine by least squares
    int any = -1;
    for (int a = 0; a < m; ++a)
      if (simplex_owner[a] == fi) {
        any = alive[a];
        break;
      }
    Vec n = normal_of(any);
    if (f.vertices.size() > static_cast<std::size_t>(d)) {
      Vec c = Vec::Zero(d);
      for (int v : f.vertices) c += points[v];
      c /= static_cast<double>(f.vertices.size());
      Mat centered(d, f.vertices.size());
      for (std::size_t k = 0; k < f.vertices.size(); ++k) centered.col(k) = points[f.vertices[k]] - c;
      Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeFullU);
      Vec ls = svd.matrixU().col(d - 1);
      if (ls.dot(n) < 0) ls = -ls;
      n = ls;
    }
    n.normalize();
    double off = 0;
    for (int v : f.vertices) off += n.dot(points[v]);
    off /= static_cast<double>(f.vertices.size());
    if (n.dot(interior) < off) {
      n = -n;
      off = -off;
    }
    f.normal = n;
    f.offset = off;
  }

  std::set<std::pair<int, int>> adj;
  for (int a = 0; a < m; ++a) {
    for (int nb : faces[alive[a]].nb) {
      int b = alive_index[nb];
      if (b < 0) continue;
      int fa = simplex_owner[a], fb = simplex_owner[b];
      if (fa != fb) adj.emplace(std::min(fa, fb), std::max(fa, fb));
    }
  }
  out.adjacency.assign(adj.begin(), adj.end());
  return out;
}

/// Certificates from an exact or estimated margin function: `margin(psi)`
/// returns the minimum of psi over unit vectors of the cone closure.
inline std::vector<StableFacetCertificate> stable_facets(
    const HullComplex& hull, const std::function<double(const Vec&)>& margin,
    double radius_used) {
  std::vector<StableFacetCertificate> out;
  out.reserve(hull.facets.size());
  for (int f = 0; f < static_cast<int>(hull.facets.size()); ++f) {
    const auto& facet = hull.facets[f];
    StableFacetCertificate c;
    c.facet = f;
    c.radius_used = radius_used;
    c.margin = margin(facet.normal);
    if (facet.offset > 0 && c.margin > 0)
      c.required_radius = facet.offset / c.margin;
    else
      c.required_radius = std::numeric_limits<double>::infinity();
    out.push_back(c);
  }
  return out;
}

/// Sample-based certificates: delta is the minimum of psi over the unit
/// samples, reduced by `safety` to absorb gaps between samples.
inline std::vector<StableFacetCertificate> stable_facets(const HullComplex& hull,
                                                         const std::vector<Vec>& samples,
                                                         double radius_used,
                                                         double safety = 0.9) {
  if (samples.empty()) throw Error("stable_facets needs at least one boundary sample");
  std::vector<Vec> unit;
  unit.reserve(samples.size());
  for (const auto& s : samples) unit.push_back(s.normalized());
  auto margin = [&](const Vec& psi) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& u : unit) m = std::min(m, psi.dot(u));
    return m > 0 ? safety * m : m;
  };
  return stable_facets(hull, margin, radius_used);
}

// ---------------------------------------------------------------------------
// Faces and triangulations of small polytopes
// ---------------------------------------------------------------------------

struct PolytopeFace {
  std::vector<int> vertices;  // sorted indices into the caller's point list
  int dim = 0;
};

namespace detail {

struct AffineFrame {
  Vec origin;
  Mat basis;  // orthonormal columns
};

inline AffineFrame affine_frame(const std::vector<Vec>& pts, const std::vector<int>& idx,
                                double tol) {
  const int d = static_cast<int>(pts[idx[0]].size());
  Vec c = Vec::Zero(d);
  for (int i : idx) c += pts[i];
  c /= static_cast<double>(idx.size());
  Mat centered(d, idx.size());
  double scale = 1.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    centered.col(k) = pts[idx[k]] - c;
    scale = std::max(scale, pts[idx[k]].cwiseAbs().maxCoeff());
  }
  return {c, linalg::range(centered, tol * scale)};
}

inline std::vector<Vec> project(const std::vector<Vec>& pts, const std::vector<int>& idx,
                                const AffineFrame& fr) {
  std::vector<Vec> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(fr.basis.transpose() * (pts[i] - fr.origin));
  return out;
}

// facets (as index subsets of idx) of the polytope spanned by pts[idx]
inline std::vector<std::vector<int>> polytope_facets(const std::vector<Vec>& pts,
                                                     const std::vector<int>& idx, double tol,
                                                     int* dim_out = nullptr) {
  AffineFrame fr = affine_frame(pts, idx, tol);
  const int m = static_cast<int>(fr.basis.cols());
  if (dim_out) *dim_out = m;
  std::vector<std::vector<int>> out;
  if (m == 0) return out;
  std::vector<Vec> local = project(pts, idx, fr);
  if (m == 1) {
    int lo = 0, hi = 0;
    for (int k = 1; k < static_cast<int>(local.size()); ++k) {
      if (local[k](0) < local[lo](0)) lo = k;
      if (local[k](0) > local[hi](0)) hi = k;
    }
    out.push_back({idx[lo]});
    out.push_back({idx[hi]});
    return out;
  }
  if (static_cast<int>(idx.size()) == m + 1) {
    for (int skip = 0; skip <= m; ++skip) {
      std::vector<int> f;
      for (int k = 0; k <= m; ++k)
        if (k != skip) f.push_back(idx[k]);
      std::sort(f.begin(), f.end());
      out.push_back(std::move(f));
    }
    return out;
  }
  HullComplex h = incremental_hull(local, tol);
  for (const auto& f : h.facets) {
    std::vector<int> g;
    for (int v : f.vertices) g.push_back(idx[v]);
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  return out;
}

inline void collect_faces(const std::vector<Vec>& pts, std::vector<int> idx, double tol,
                          std::map<std::vector<int>, int>& found) {
  std::sort(idx.begin(), idx.end());
  if (found.count(idx)) return;
  int m = 0;
  auto facets = polytope_facets(pts, idx, tol, &m);
  found.emplace(idx, m);
  for (auto& f : facets) collect_faces(pts, f, tol, found);
}

}  // namespace detail

/// Every face of the polytope conv(points), including the polytope itself,
/// as sorted index sets with their dimensions. Only extreme points appear.
inline std::vector<PolytopeFace> polytope_faces(const std::vector<Vec>& points,
                                                double tol = 1e-7) {
  if (points.empty()) return {};
  std::vector<int> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::map<std::vector<int>, int> found;
  detail::collect_faces(points, idx, tol, found);
  std::vector<PolytopeFace> out;
  for (auto& [v, m] : found) out.push_back({v, m});
  std::sort(out.begin(), out.end(), [](const PolytopeFace& a, const PolytopeFace& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });
  return out;
}

/// Affine dimension of a point set.
inline int affine_dimension(const std::vector<Vec>& points, double tol = 1e-9) {
  if (points.empty()) return -1;
  std::vector<int> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  return static_cast<int>(detail::affine_frame(points, idx, tol).basis.cols());
}

/// Pulling triangulation of conv(points[subset]): cone from the vertex that
/// comes first under `less`, over the triangulations of the facets avoiding
/// it. Returns simplices as index lists ordered by `less`.
inline std::vector<std::vector<int>> pulling_triangulation(
    const std::vector<Vec>& points, std::vector<int> subset,
    const std::function<bool(int, int)>& less, double tol = 1e-7) {
  std::sort(subset.begin(), subset.end(), less);
  int m = 0;
  auto facets = detail::polytope_facets(points, subset, tol, &m);
  if (m == 0) return {{subset.front()}};
  if (static_cast<int>(subset.size()) == m + 1) return {subset};
  if (m == 1) {
    std::vector<int> seg{facets[0][0], facets[1][0]};
    std::sort(seg.begin(), seg.end(), less);
    return {seg};
  }
  const int apex = subset.front();
  std::vector<std::vector<int>> out;
  for (const auto& f : facets) {
    if (std::find(f.begin(), f.end(), apex) != f.end()) continue;
    for (auto s : pulling_triangulation(points, f, less, tol)) {
      s.insert(s.begin(), apex);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace projcell
