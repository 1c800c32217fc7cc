#pragma once

// Properly convex cones in R^{n+1}: membership, duals, the characteristic
// function f(x) = int_{C*} exp(-psi(x)) dpsi, Vinberg lifts, horofunctions
// and horoballs.

#include "projcell/core.hpp"
#include "projcell/hull.hpp"

#include <random>

namespace projcell {

enum class ConeVariant { Lorentz, Orthant, Polyhedral, OrbitHull };

inline const char* variant_name(ConeVariant v) {
  switch (v) {
    case ConeVariant::Lorentz: return "lorentz";
    case ConeVariant::Orthant: return "orthant";
    case ConeVariant::Polyhedral: return "polyhedral";
    case ConeVariant::OrbitHull: return "orbit_hull";
  }
  return "?";
}

struct CharFunctionValue {
  double value = 0.0;
  Vec gradient;
};

/// Affine chart {l = 1} with an orthonormal basis of ker l; for the standard
/// Lorentz cone this is the Klein model.
struct Chart {
  Vec ell;
  Vec center;  // a point with ell(center) = 1
  Mat basis;   // columns span ker ell

  Vec to_chart(const Vec& x) const {
    const double l = ell.dot(x);
    if (std::abs(l) < 1e-300) throw Error("point at infinity of the chart");
    return basis.transpose() * (x / l - center);
  }
  Vec from_chart(const Vec& c) const { return center + basis * c; }
};

class ConeModel {
 public:
  ConeModel() = default;

  /// {x : y_N > |y'|} with y = frame^{-1} x.
  static ConeModel lorentz(int dim, const Mat& frame = Mat()) {
    ConeModel c;
    c.init_basic(ConeVariant::Lorentz, dim, frame);
    return c;
  }

  /// {x : y_i > 0 for all i} with y = frame^{-1} x.
  static ConeModel orthant(int dim, const Mat& frame = Mat()) {
    ConeModel c;
    c.init_basic(ConeVariant::Orthant, dim, frame);
    return c;
  }

  /// Open cone spanned by the given rays.
  static ConeModel polyhedral(const std::vector<Vec>& rays, double tol = 1e-9) {
    ConeModel c;
    c.init_polyhedral(ConeVariant::Polyhedral, rays, tol);
    return c;
  }

  /// Cone spanned by sampled boundary directions of an orbit closure; the
  /// samples are kept for certificate margins.
  static ConeModel orbit_hull(const std::vector<Vec>& rays, double tol = 1e-9) {
    ConeModel c;
    c.init_polyhedral(ConeVariant::OrbitHull, rays, tol);
    c.samples_ = rays;
    for (auto& s : c.samples_)
      if (std::abs(s.norm() - 1.0) > 1e-14) s.normalize();
    return c;
  }

  ConeVariant variant() const { return variant_; }
  int dim() const { return dim_; }
  const Mat& frame() const { return frame_; }
  bool has_frame() const { return has_frame_; }
  const std::vector<Vec>& rays() const { return rays_; }      // extreme rays (unit)
  const std::vector<Vec>& facets() const { return facets_; }  // unit inward normals
  const std::vector<Vec>& samples() const { return samples_; }
  double lorentz_constant() const { return lorentz_c_; }

  /// Signed relative distance-like margin; positive exactly on the open cone.
  double margin(const Vec& x) const {
    check_dim(x);
    const double nx = x.norm();
    if (nx == 0.0) return 0.0;
    switch (variant_) {
      case ConeVariant::Lorentz: {
        Vec y = to_frame(x);
        return (y(dim_ - 1) - y.head(dim_ - 1).norm()) / y.norm();
      }
      case ConeVariant::Orthant: {
        Vec y = to_frame(x);
        return y.minCoeff() / y.norm();
      }
      default: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& f : facets_) m = std::min(m, f.dot(x));
        return m / nx;
      }
    }
  }

  bool contains(const Vec& x, const Tolerances& tol = {}) const {
    return margin(x) > tol.eps_geom;
  }
  bool contains_closure(const Vec& x, const Tolerances& tol = {}) const {
    return x.norm() > 0 && margin(x) >= -tol.eps_geom;
  }
  bool on_boundary(const Vec& x, const Tolerances& tol = {}) const {
    return x.norm() > 0 && std::abs(margin(x)) <= tol.eps_geom;
  }

  /// A canonical interior point.
  Vec interior_point() const {
    switch (variant_) {
      case ConeVariant::Lorentz: return from_frame(Vec::Unit(dim_, dim_ - 1));
      case ConeVariant::Orthant: return from_frame(Vec::Ones(dim_));
      default: {
        Vec s = Vec::Zero(dim_);
        for (const auto& r : rays_) s += r;
        return s.normalized();
      }
    }
  }

  ConeModel dual() const {
    switch (variant_) {
      case ConeVariant::Lorentz:
      case ConeVariant::Orthant: {
        ConeModel c;
        Mat f = has_frame_ ? Mat(frame_.inverse().transpose()) : Mat();
        c.init_basic(variant_, dim_, f);
        return c;
      }
      default: return polyhedral(facets_);
    }
  }

  /// f(x) and its gradient. Throws OutsideCone unless x is in the open cone.
  CharFunctionValue char_function(const Vec& x, const Tolerances& tol = {}) const {
    check_dim(x);
    if (!x.allFinite() || !contains(x, tol)) throw OutsideCone();
    CharFunctionValue out;
    const int N = dim_;
    switch (variant_) {
      case ConeVariant::Lorentz: {
        Vec y = to_frame(x);
        const double q = y(N - 1) * y(N - 1) - y.head(N - 1).squaredNorm();
        out.value = lorentz_c_ * std::pow(q, -0.5 * N) / det_abs_;
        Vec dq(N);
        dq.head(N - 1) = -2.0 * y.head(N - 1);
        dq(N - 1) = 2.0 * y(N - 1);
        Vec gy = out.value * (-0.5 * N / q) * dq;
        out.gradient = frame_inv_.transpose() * gy;
        return out;
      }
      case ConeVariant::Orthant: {
        Vec y = to_frame(x);
        out.value = 1.0 / (y.prod() * det_abs_);
        Vec gy = -out.value * y.cwiseInverse();
        out.gradient = frame_inv_.transpose() * gy;
        return out;
      }
      default: {
        out.value = 0.0;
        out.gradient = Vec::Zero(N);
        for (std::size_t s = 0; s < dual_simplices_.size(); ++s) {
          const auto& simp = dual_simplices_[s];
          double prod = 1.0;
          Vec g = Vec::Zero(N);
          for (int i : simp) {
            const double v = facets_[i].dot(x);
            prod *= v;
            g -= facets_[i] / v;
          }
          const double term = dual_dets_[s] / prod;
          out.value += term;
          out.gradient += term * g;
        }
        return out;
      }
    }
  }

  double f(const Vec& x, const Tolerances& tol = {}) const {
    return char_function(x, tol).value;
  }

  /// min of psi over unit vectors of the closed cone. Exact for the standard
  /// Lorentz cone and for polyhedral variants (attained on extreme rays);
  /// sampled with a 10% safety reduction for framed Lorentz cones.
  double min_unit_boundary(const Vec& psi) const {
    check_dim(psi);
    const int N = dim_;
    if (variant_ == ConeVariant::Lorentz && !has_frame_)
      return (psi(N - 1) - psi.head(N - 1).norm()) / std::sqrt(2.0);
    if (variant_ == ConeVariant::Lorentz) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& u : boundary_samples(N == 3 ? 4096 : 20000)) m = std::min(m, psi.dot(u));
      return m > 0 ? 0.9 * m : m;
    }
    if (variant_ == ConeVariant::Orthant) {
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < N; ++i) m = std::min(m, psi.dot(from_frame(Vec::Unit(N, i)).normalized()));
      return m;
    }
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rays_) m = std::min(m, psi.dot(r));
    return m;
  }

  /// Unit vectors on the cone boundary. Deterministic.
  std::vector<Vec> boundary_samples(int count) const {
    const int N = dim_;
    std::vector<Vec> out;
    if (count <= 0) return out;
    if (variant_ == ConeVariant::Lorentz) {
      for (const auto& w : sphere_points(N - 1, count)) {
        Vec y(N);
        y.head(N - 1) = w;
        y(N - 1) = 1.0;
        out.push_back(from_frame(y).normalized());
      }
      return out;
    }
    if (variant_ == ConeVariant::OrbitHull && !samples_.empty()) {
      if (static_cast<int>(samples_.size()) <= count) return samples_;
    }
    // extreme rays plus random convex combinations inside facets
    std::vector<Vec> extreme;
    if (variant_ == ConeVariant::Orthant) {
      for (int i = 0; i < N; ++i) extreme.push_back(from_frame(Vec::Unit(N, i)).normalized());
    } else {
      extreme = rays_;
    }
    std::vector<Vec> normals;
    if (variant_ == ConeVariant::Orthant) {
      for (int i = 0; i < N; ++i) normals.push_back(frame_inv_.row(i).transpose().normalized());
    } else {
      normals = facets_;
    }
    out = extreme;
    std::mt19937_64 rng(12345);
    std::exponential_distribution<double> ex(1.0);
    const double ztol = 1e-9;
    std::vector<std::vector<int>> facet_rays(normals.size());
    for (std::size_t f = 0; f < normals.size(); ++f)
      for (std::size_t r = 0; r < extreme.size(); ++r)
        if (std::abs(normals[f].dot(extreme[r])) <= ztol) facet_rays[f].push_back(static_cast<int>(r));
    std::size_t f = 0;
    while (static_cast<int>(out.size()) < count && !normals.empty()) {
      const auto& fr = facet_rays[f % normals.size()];
      ++f;
      if (fr.empty()) continue;
      Vec s = Vec::Zero(N);
      for (int r : fr) s += ex(rng) * extreme[r];
      out.push_back(s.normalized());
    }
    return out;
  }

  /// Supporting functional at a boundary direction: zero on v, nonnegative
  /// on the closed cone, unit norm.
  DualFunctional supporting_functional(const Vec& v, const Tolerances& tol = {}) const {
    check_dim(v);
    if (v.norm() == 0.0) throw Error("supporting_functional needs a nonzero vector");
    if (!on_boundary(v, tol)) throw Error("vector is not on the cone boundary");
    const int N = dim_;
    if (variant_ == ConeVariant::Lorentz) {
      Vec y = to_frame(v);
      Vec phi_y(N);
      phi_y.head(N - 1) = -y.head(N - 1);
      phi_y(N - 1) = y(N - 1);
      Vec phi = frame_inv_.transpose() * phi_y;
      return DualFunctional(phi.normalized());
    }
    std::vector<Vec> normals;
    if (variant_ == ConeVariant::Orthant) {
      for (int i = 0; i < N; ++i) normals.push_back(frame_inv_.row(i).transpose().normalized());
    } else {
      normals = facets_;
    }
    const Vec u = v.normalized();
    std::vector<Vec> active;
    for (const auto& nrm : normals)
      if (std::abs(nrm.dot(u)) <= tol.eps_geom) active.push_back(nrm);
    if (active.empty()) throw Error("vector is not on the cone boundary");
    for (std::size_t i = 1; i < active.size(); ++i)
      if (projective_distance(active[i], active[0]) > 1e-6)
        throw Error("supporting hyperplane not unique");
    return DualFunctional(active[0]);
  }

  /// Affine chart whose defining functional is interior to the dual cone.
  Chart chart() const {
    Chart c;
    c.ell = dual().interior_point().normalized();
    if (variant_ == ConeVariant::Lorentz && !has_frame_) c.ell = Vec::Unit(dim_, dim_ - 1);
    c.center = c.ell / c.ell.squaredNorm();
    Mat e(dim_, 1);
    e.col(0) = c.ell;
    c.basis = linalg::complement(e);
    if (variant_ == ConeVariant::Lorentz && !has_frame_)
      c.basis = Mat::Identity(dim_, dim_).leftCols(dim_ - 1);
    return c;
  }

  /// Point of the open cone whose ray is v or -v; throws if neither.
  Vec orient(const Vec& v, const Tolerances& tol = {}) const {
    if (margin(v) >= -tol.eps_geom) return v;
    if (margin(-v) >= -tol.eps_geom) return -v;
    throw OutsideCone();
  }

 private:
  void check_dim(const Vec& x) const {
    if (x.size() != dim_) throw Error("dimension mismatch with cone");
  }

  Vec to_frame(const Vec& x) const { return has_frame_ ? Vec(frame_inv_ * x) : x; }
  Vec from_frame(const Vec& y) const { return has_frame_ ? Vec(frame_ * y) : y; }

  void init_basic(ConeVariant v, int dim, const Mat& frame) {
    if (dim < 2) throw Error("cone dimension must be at least 2");
    variant_ = v;
    dim_ = dim;
    if (frame.size() == 0) {
      frame_ = Mat::Identity(dim, dim);
      has_frame_ = false;
    } else {
      if (frame.rows() != dim || frame.cols() != dim) throw Error("frame has wrong size");
      require_invertible(frame);
      frame_ = frame;
      has_frame_ = !frame.isApprox(Mat::Identity(dim, dim), 1e-15);
    }
    frame_inv_ = frame_.inverse();
    det_abs_ = std::abs(frame_.determinant());
    if (v == ConeVariant::Lorentz)
      lorentz_c_ = linalg::unit_ball_volume(dim - 1) * linalg::factorial(dim - 1);
  }

  void init_polyhedral(ConeVariant v, const std::vector<Vec>& rays, double tol) {
    if (rays.empty()) throw Error("polyhedral cone needs rays");
    variant_ = v;
    dim_ = static_cast<int>(rays.front().size());
    if (dim_ < 2) throw Error("cone dimension must be at least 2");
    frame_ = Mat::Identity(dim_, dim_);
    frame_inv_ = frame_;
    std::vector<Vec> pts{Vec::Zero(dim_)};
    for (const auto& r : rays) {
      if (r.size() != dim_ || !r.allFinite() || r.norm() == 0)
        throw Error("invalid ray in polyhedral cone");
      pts.push_back(std::abs(r.norm() - 1.0) <= 1e-14 ? r : Vec(r.normalized()));
    }
    HullComplex h;
    try {
      h = incremental_hull(pts, tol);
    } catch (const DegenerateInput&) {
      throw Error("not full-dimensional");
    }
    for (const auto& f : h.facets)
      if (std::abs(f.offset) <= 10 * h.tolerance) facets_.push_back(f.normal);
    if (facets_.size() < static_cast<std::size_t>(dim_)) throw Error("cone is not pointed");
    // extreme rays: unit rays lying on facets spanning a hyperplane
    for (std::size_t i = 1; i < pts.size(); ++i) {
      std::vector<Vec> act;
      for (const auto& f : facets_)
        if (std::abs(f.dot(pts[i])) <= 1e-8) act.push_back(f);
      if (static_cast<int>(act.size()) < dim_ - 1) continue;
      Mat a(dim_, act.size());
      for (std::size_t k = 0; k < act.size(); ++k) a.col(k) = act[k];
      if (linalg::rank(a, 1e-8) != dim_ - 1) continue;
      bool dup = false;
      for (const auto& r : rays_)
        if ((r - pts[i]).norm() < 1e-9) dup = true;
      if (!dup) rays_.push_back(pts[i]);
    }
    build_dual_triangulation();
  }

  // Triangulate the dual cone (spanned by facets_) through an affine slice.
  void build_dual_triangulation() {
    const Vec xref = interior_point();
    std::vector<Vec> eta;
    for (const auto& f : facets_) {
      const double s = f.dot(xref);
      if (s <= 0) throw Error("cone is not pointed");
      eta.push_back(f / s);
    }
    std::vector<int> idx(eta.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto simplices = pulling_triangulation(eta, idx, [](int a, int b) { return a < b; }, 1e-10);
    for (auto& s : simplices) {
      Mat m(dim_, dim_);
      for (int k = 0; k < dim_; ++k) m.col(k) = facets_[s[k]];
      const double d = std::abs(m.determinant());
      if (d <= 1e-14) continue;
      dual_simplices_.push_back(s);
      dual_dets_.push_back(d);
    }
    if (dual_simplices_.empty()) throw Error("dual cone triangulation failed");
  }

  static std::vector<Vec> sphere_points(int k, int count) {
    std::vector<Vec> out;
    if (k == 1) {
      out.push_back(Vec::Constant(1, 1.0));
      out.push_back(Vec::Constant(1, -1.0));
      return out;
    }
    if (k == 2) {
      for (int i = 0; i < count; ++i) {
        const double a = 2.0 * std::numbers::pi * i / count;
        Vec w(2);
        w << std::cos(a), std::sin(a);
        out.push_back(w);
      }
      return out;
    }
    if (k == 3) {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(1.0 - z * z);
        Vec w(3);
        w << r * std::cos(golden * i), r * std::sin(golden * i), z;
        out.push_back(w);
      }
      return out;
    }
    std::mt19937_64 rng(777);
    std::normal_distribution<double> nd;
    for (int i = 0; i < count; ++i) {
      Vec w(k);
      for (int j = 0; j < k; ++j) w(j) = nd(rng);
      out.push_back(w.normalized());
    }
    return out;
  }

  ConeVariant variant_ = ConeVariant::Lorentz;
  int dim_ = 0;
  Mat frame_, frame_inv_;
  bool has_frame_ = false;
  double det_abs_ = 1.0;
  double lorentz_c_ = 0.0;
  std::vector<Vec> rays_, facets_, samples_;
  std::vector<std::vector<int>> dual_simplices_;
  std::vector<double> dual_dets_;
};

inline ConeModel dual_cone(const ConeModel& c) { return c.dual(); }

inline CharFunctionValue char_function(const ConeModel& c, const Vec& x,
                                       const Tolerances& tol = {}) {
  return c.char_function(x, tol);
}

/// The point s*x of the Vinberg hypersurface f = 1 on the ray of p.
inline Vec vinberg_lift(const ConeModel& cone, const Vec& p, const Tolerances& tol = {}) {
  Vec x = p;
  if (!cone.contains(x, tol)) {
    if (cone.contains(-x, tol))
      x = -x;
    else
      throw OutsideCone();
  }
  const double s = std::pow(cone.f(x, tol), 1.0 / cone.dim());
  return s * x;
}

inline Vec vinberg_lift(const ConeModel& cone, const ProjPoint& p, const Tolerances& tol = {}) {
  return vinberg_lift(cone, p.coords(), tol);
}

enum class FunctionalKind { Interior, Boundary, Outside };

/// Position of phi relative to the closed dual cone.
inline FunctionalKind classify_functional(const ConeModel& cone, const DualFunctional& phi,
                                          const Tolerances& tol = {}) {
  const double m = cone.min_unit_boundary(phi.normalized().covector());
  if (m > tol.eps_geom) return FunctionalKind::Interior;
  if (m >= -tol.eps_geom) return FunctionalKind::Boundary;
  return FunctionalKind::Outside;
}

inline double horofunction(const ConeModel& cone, const DualFunctional& phi, const Vec& p,
                           const Tolerances& tol = {}) {
  return phi(vinberg_lift(cone, p, tol));
}

inline double horofunction(const ConeModel& cone, const DualFunctional& phi, const ProjPoint& p,
                           const Tolerances& tol = {}) {
  return horofunction(cone, phi, p.coords(), tol);
}

struct Horoball {
  DualFunctional phi;
  double t = 1.0;
};

inline bool horoball_contains(const ConeModel& cone, const Horoball& hb, const Vec& p,
                              const Tolerances& tol = {}) {
  return horofunction(cone, hb.phi, p, tol) <= hb.t + tol.eps_geom;
}

inline bool horoball_contains(const ConeModel& cone, const Horoball& hb, const ProjPoint& p,
                              const Tolerances& tol = {}) {
  return horoball_contains(cone, hb, p.coords(), tol);
}

inline DualFunctional supporting_functional(const ConeModel& cone, const Vec& v,
                                            const Tolerances& tol = {}) {
  return cone.supporting_functional(v, tol);
}

}  // namespace projcell
