#pragma once

// Rebuilding a fundamental polytope under a deformation of the holonomy:
// triangulate the base polytope compatibly with its face pairings, track
// an isolated fixed point for each cusp, and move every vertex by its word.

#include "projcell/decomp.hpp"

namespace projcell {

class HypothesisViolated : public Error {
 public:
  explicit HypothesisViolated(const std::string& cusp)
      : Error("hypothesis violated for cusp " + cusp + ": no isolated common fixed point"),
        cusp_(cusp) {}
  const std::string& cusp() const { return cusp_; }

 private:
  std::string cusp_;
};

class AmbiguousTracking : public Error {
 public:
  explicit AmbiguousTracking(const std::string& cusp)
      : Error("ambiguous tracking for cusp " + cusp), cusp_(cusp) {}
  const std::string& cusp() const { return cusp_; }

 private:
  std::string cusp_;
};

struct PolytopeVertex {
  Vec lift;  // base position
  int cusp = 0;
  std::string word;  // lift = word . (cusp point)
};

/// The word maps simplex `from` onto simplex `to`, vertex i onto vertex
/// vertex_map[i].
struct SimplexPairing {
  int from = -1;
  int to = -1;
  std::string word;
  std::vector<int> vertex_map;
};

struct TriangulatedPolytope {
  int dim = 0;  // n + 1
  std::vector<PolytopeVertex> vertices;
  Vec x0;  // interior cone vertex
  std::vector<std::vector<int>> simplices;  // boundary (n-1)-simplices
  std::vector<int> simplex_face;            // decomposition face each simplex lies in
  std::vector<int> orientation;             // sign of det[x0, vertices] at the base
  std::vector<SimplexPairing> pairings;
  std::vector<Vec> cusp_points;             // base fixed points (cone-oriented)
  std::vector<std::string> cusp_names;
  std::vector<std::vector<std::string>> cusp_words;
  Representation base;
};

namespace detail {

inline double simplex_det(const Vec& x0, const std::vector<Vec>& vs) {
  Mat m(x0.size(), vs.size() + 1);
  m.col(0) = x0.normalized();
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(i + 1) = vs[i].normalized();
  return m.determinant();
}

}  // namespace detail

/// Triangulates the boundary of the fundamental polytope of `dec` with a
/// pulling rule: one face of each paired couple is triangulated and the
/// partner receives the image under the pairing word.
inline TriangulatedPolytope triangulate_base(const CellDecomposition& dec,
                                             const Representation& rep) {
  const auto& fp = dec.fundamental;
  if (fp.cells.empty() || !fp.complete)
    throw Error("decomposition has no complete fundamental polytope");
  TriangulatedPolytope tp;
  tp.dim = dec.dim;
  tp.base = rep;
  for (const auto& c : dec.cusps) {
    tp.cusp_points.push_back(c.point);
    tp.cusp_names.push_back(c.name);
    tp.cusp_words.push_back(c.words);
  }
  // vertices of P0 in increasing decomposition id
  std::map<int, int> local;
  std::set<int> ids;
  for (int c : fp.cells) ids.insert(dec.cells[c].vertices.begin(), dec.cells[c].vertices.end());
  for (int v : ids) {
    local[v] = static_cast<int>(tp.vertices.size());
    const auto& pv = dec.vertices[v];
    tp.vertices.push_back({pv.lift, pv.cusp, pv.word});
  }
  tp.x0 = Vec::Zero(dec.dim);
  for (const auto& v : tp.vertices) tp.x0 += v.lift / dec.chart.ell.dot(v.lift);
  tp.x0 /= static_cast<double>(tp.vertices.size());

  std::vector<Vec> pos;
  for (const auto& v : tp.vertices) pos.push_back(v.lift);
  auto less = [](int a, int b) { return a < b; };

  // pairings ordered by the lowest vertex of either face
  std::vector<FacePairing> prs = fp.pairings;
  auto lowest = [&](const FacePairing& p) {
    int lo = std::numeric_limits<int>::max();
    for (int v : dec.cells[p.face].vertices) lo = std::min(lo, local.at(v));
    for (int v : dec.cells[p.partner].vertices) lo = std::min(lo, local.at(v));
    return lo;
  };
  std::stable_sort(prs.begin(), prs.end(), [&](const FacePairing& a, const FacePairing& b) {
    return lowest(a) < lowest(b);
  });
  std::map<int, std::vector<std::vector<int>>> face_tri;  // face id -> simplices (local ids)
  for (const auto& p : prs) {
    // triangulate the face holding the lowest vertex, push to the other
    int lo_face = -1;
    {
      int lf = std::numeric_limits<int>::max(), lp = lf;
      for (int v : dec.cells[p.face].vertices) lf = std::min(lf, local.at(v));
      for (int v : dec.cells[p.partner].vertices) lp = std::min(lp, local.at(v));
      lo_face = lf <= lp ? p.face : p.partner;
    }
    const bool forward = lo_face == p.face;  // word maps lo_face to the other
    const int src = lo_face;
    const int dst = forward ? p.partner : p.face;
    const auto& sv = dec.cells[src].vertices;
    const auto& dv = dec.cells[dst].vertices;
    // vertex map src position -> dst position
    std::vector<int> vmap(sv.size());
    if (forward) {
      vmap = p.vertex_map;
    } else {
      for (std::size_t i = 0; i < p.vertex_map.size(); ++i) vmap[p.vertex_map[i]] = static_cast<int>(i);
    }
    std::vector<int> subset;
    for (int v : sv) subset.push_back(local.at(v));
    auto tri = pulling_triangulation(pos, subset, less, 1e-9);
    std::vector<std::vector<int>> image;
    std::map<int, int> lmap;  // local src vertex -> local dst vertex
    for (std::size_t i = 0; i < sv.size(); ++i) lmap[local.at(sv[i])] = local.at(dv[vmap[i]]);
    for (const auto& s : tri) {
      std::vector<int> t;
      for (int v : s) t.push_back(lmap.at(v));
      image.push_back(t);
    }
    if (src == dst) {
      std::set<std::vector<int>> a, b;
      for (auto s : tri) {
        std::sort(s.begin(), s.end());
        a.insert(s);
      }
      for (auto s : image) {
        std::sort(s.begin(), s.end());
        b.insert(s);
      }
      if (a != b)
        throw Error("pairing-inconsistent triangulation of self-paired face " + std::to_string(src));
    }
    if (face_tri.count(src) || face_tri.count(dst))
      throw Error("face paired twice: " + std::to_string(src) + "/" + std::to_string(dst));
    const std::string w = forward ? p.word : word::inverse(p.word);
    std::vector<int> src_ids, dst_ids;
    for (std::size_t k = 0; k < tri.size(); ++k) {
      src_ids.push_back(static_cast<int>(tp.simplices.size()));
      tp.simplices.push_back(tri[k]);
      tp.simplex_face.push_back(src);
    }
    if (src != dst) {
      for (std::size_t k = 0; k < image.size(); ++k) {
        dst_ids.push_back(static_cast<int>(tp.simplices.size()));
        tp.simplices.push_back(image[k]);
        tp.simplex_face.push_back(dst);
      }
    } else {
      // self-paired: find each image among the source simplices
      for (const auto& im : image) {
        std::vector<int> key = im;
        std::sort(key.begin(), key.end());
        int found = -1;
        for (std::size_t k = 0; k < tri.size(); ++k) {
          std::vector<int> s = tri[k];
          std::sort(s.begin(), s.end());
          if (s == key) found = src_ids[k];
        }
        dst_ids.push_back(found);
      }
    }
    face_tri[src] = tri;
    face_tri[dst] = image;
    for (std::size_t k = 0; k < tri.size(); ++k) {
      SimplexPairing sp;
      sp.from = src_ids[k];
      sp.to = dst_ids[k];
      sp.word = w;
      const auto& target = tp.simplices[sp.to];
      for (std::size_t i = 0; i < tri[k].size(); ++i) {
        const int img = image[k][i];
        sp.vertex_map.push_back(
            static_cast<int>(std::find(target.begin(), target.end(), img) - target.begin()));
      }
      tp.pairings.push_back(sp);
    }
  }
  // closed pseudomanifold check on the boundary
  std::map<std::vector<int>, int> ridge_count;
  for (const auto& s : tp.simplices) {
    for (std::size_t skip = 0; skip < s.size(); ++skip) {
      std::vector<int> r;
      for (std::size_t k = 0; k < s.size(); ++k)
        if (k != skip) r.push_back(s[k]);
      std::sort(r.begin(), r.end());
      ridge_count[r] += 1;
    }
  }
  for (const auto& [r, c] : ridge_count)
    if (c != 2) throw Error("boundary triangulation is not closed");
  for (const auto& s : tp.simplices) {
    std::vector<Vec> vs;
    for (int v : s) vs.push_back(tp.vertices[v].lift);
    const double d = detail::simplex_det(tp.x0, vs);
    tp.orientation.push_back(d > 0 ? 1 : (d < 0 ? -1 : 0));
  }
  return tp;
}

/// For each cusp, the isolated common fixed point of the deformed cusp
/// subgroup nearest to the base fixed point.
inline std::vector<Vec> track_fixed_points(const Representation& rep_t,
                                           const TriangulatedPolytope& base,
                                           const Tolerances& tol = {}) {
  std::vector<Vec> out;
  for (std::size_t c = 0; c < base.cusp_points.size(); ++c) {
    std::vector<Mat> mats;
    for (const auto& w : base.cusp_words[c]) mats.push_back(rep_t.eval(w));
    auto fps = common_fixed_points(mats, tol);
    std::vector<std::pair<double, Vec>> cand;
    for (const auto& f : fps) {
      if (!f.isolated) continue;
      Vec v = f.point.coords();
      cand.emplace_back(projective_distance(v, base.cusp_points[c]), v);
    }
    if (cand.empty()) throw HypothesisViolated(base.cusp_names[c]);
    std::sort(cand.begin(), cand.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (cand.size() > 1 && cand[1].first <= 2 * cand[0].first + 1e-12)
      throw AmbiguousTracking(base.cusp_names[c]);
    Vec v = cand[0].second;
    if (v.dot(base.cusp_points[c]) < 0) v = -v;
    out.push_back(v);
  }
  return out;
}

struct DeformationResult {
  std::vector<Vec> vertices;  // deformed positions, aligned with the base
  Vec x0;
  std::vector<std::vector<int>> simplices;
  std::vector<Vec> radial_points;  // per cusp
  double max_residual = 0.0;       // projective distance
  double max_drift = 0.0;
  double rep_distance = 0.0;
  double min_abs_det = 0.0;
  bool valid = false;
  std::vector<int> degenerate_simplices;
  std::vector<std::string> bad_words;
  std::vector<std::string> issues;
};

/// Moves every vertex to rho_t(word) . (tracked cusp point) and checks
/// the pairings and the simplices against the base.
inline DeformationResult deform(const TriangulatedPolytope& base, const Representation& rep_t,
                                const Tolerances& tol = {}) {
  if (rep_t.dim() != base.dim) throw Error("deformed representation has the wrong dimension");
  DeformationResult r;
  r.radial_points = track_fixed_points(rep_t, base, tol);
  r.rep_distance = generator_distance(base.base, rep_t);
  r.x0 = base.x0;
  r.simplices = base.simplices;
  for (const auto& v : base.vertices) {
    Vec x = rep_t.eval(v.word) * r.radial_points[v.cusp];
    if (x.dot(v.lift) < 0) x = -x;
    r.vertices.push_back(x);
    r.max_drift = std::max(r.max_drift, projective_distance(x, v.lift));
  }
  for (const auto& p : base.pairings) {
    Mat g = rep_t.eval(p.word);
    const auto& a = base.simplices[p.from];
    const auto& b = base.simplices[p.to];
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, projective_distance(g * r.vertices[a[i]], r.vertices[b[p.vertex_map[i]]]));
    r.max_residual = std::max(r.max_residual, worst);
    if (worst >= tol.eps_geom) {
      r.bad_words.push_back(p.word);
      r.issues.push_back("pairing word " + p.word + " has residual " + std::to_string(worst));
    }
  }
  r.min_abs_det = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < base.simplices.size(); ++s) {
    std::vector<Vec> vs;
    for (int v : base.simplices[s]) vs.push_back(r.vertices[v]);
    const double d = detail::simplex_det(r.x0, vs);
    r.min_abs_det = std::min(r.min_abs_det, std::abs(d));
    const int sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (std::abs(d) < tol.eps_geom || sign != base.orientation[s]) {
      r.degenerate_simplices.push_back(static_cast<int>(s));
      r.issues.push_back("simplex " + std::to_string(s) + " is degenerate or flipped");
    }
  }
  r.valid = r.degenerate_simplices.empty() && r.bad_words.empty();
  return r;
}

struct ValiditySweep {
  double threshold = 0.0;  // largest parameter found valid
  double first_invalid = std::numeric_limits<double>::infinity();
  bool invalid_found = false;
  bool monotone = true;  // valid at s implies valid at s/2 on the sampled points
  std::vector<std::pair<double, bool>> samples;
};

/// Bisects for the largest s in [0, s_max] at which deform stays valid
/// along the path s -> rep(s). Tracking failures count as invalid.
inline ValiditySweep validity_sweep(const TriangulatedPolytope& base,
                                    const std::function<Representation(double)>& path,
                                    double s_max, int iterations = 30,
                                    const Tolerances& tol = {}) {
  ValiditySweep sw;
  auto valid_at = [&](double s) {
    bool ok = false;
    try {
      ok = deform(base, path(s), tol).valid;
    } catch (const Error&) {
      ok = false;
    }
    sw.samples.emplace_back(s, ok);
    return ok;
  };
  if (valid_at(s_max)) {
    sw.threshold = s_max;
  } else {
    sw.invalid_found = true;
    double lo = 0.0, hi = s_max;
    for (int i = 0; i < iterations; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (valid_at(mid))
        lo = mid;
      else
        hi = mid;
    }
    sw.threshold = lo;
    sw.first_invalid = hi;
  }
  for (double s = sw.threshold; s > sw.threshold * 1e-3 && s > 0; s /= 2)
    if (!valid_at(s)) sw.monotone = false;
  return sw;
}

}  // namespace projcell
