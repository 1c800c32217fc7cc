#pragma once

// Projective linear algebra over R^{n+1}: tolerances, projective points,
// dual functionals, the dual action, spectral analysis and the Lorentz
// embeddings used to build example holonomies.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace projcell {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotInvertible : public Error {
 public:
  NotInvertible() : Error("not invertible") {}
};

class OutsideCone : public Error {
 public:
  explicit OutsideCone(const std::string& what = "outside cone") : Error(what) {}
};

class DegenerateInput : public Error {
 public:
  DegenerateInput(const std::string& what, int affine_dim)
      : Error(what), affine_dim_(affine_dim) {}
  int affine_dim() const { return affine_dim_; }

 private:
  int affine_dim_;
};

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

struct Tolerances {
  double eps_equal = 1e-9;  // matrix / point identity
  double eps_geom = 1e-7;   // coplanarity, containment
  double eps_eig = 1e-6;    // eigenvalue modulus tests, rank decisions

  void validate() const {
    if (!(eps_equal > 0 && eps_geom > 0 && eps_eig > 0))
      throw Error("tolerances must be strictly positive");
    if (eps_equal > eps_geom) throw Error("eps_equal must not exceed eps_geom");
  }
};

// ---------------------------------------------------------------------------
// Small dense linear-algebra helpers
// ---------------------------------------------------------------------------

namespace linalg {

inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline double fro(const Mat& m) { return m.norm(); }

// Orthonormal basis (columns) of the numerical kernel of `m`. A singular value
// counts as zero when it is at most `tol`.
inline Mat null_space(const Mat& m, double tol) {
  const int cols = static_cast<int>(m.cols());
  if (m.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

inline Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& m, double tol) {
  const int cols = static_cast<int>(m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

inline int rank(const Mat& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

// Orthonormal basis of the column span of `m`.
inline Mat range(const Mat& m, double tol) {
  if (m.cols() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the orthogonal complement of the span of `m`'s columns.
inline Mat complement(const Mat& m, double tol = 1e-12) {
  return null_space(Mat(m.transpose()), tol * std::max(1.0, m.norm()));
}

// Intersection of two subspaces given by orthonormal bases; directions whose
// principal angle is below `angle_tol` are kept.
inline Mat intersect(const Mat& a, const Mat& b, double angle_tol) {
  if (a.cols() == 0 || b.cols() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a.transpose() * b, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  const double cos_tol = std::cos(angle_tol);
  int k = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) >= cos_tol) ++k;
  Mat out = a * svd.matrixU().leftCols(k);
  // re-orthonormalize
  if (k > 0) {
    Eigen::HouseholderQR<Mat> qr(out);
    out = qr.householderQ() * Mat::Identity(out.rows(), k);
  }
  return out;
}

inline double factorial(int k) { return std::tgamma(k + 1.0); }

// Volume of the unit ball in R^k.
inline double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

}  // namespace linalg

inline void require_square(const Mat& g) {
  if (g.rows() != g.cols() || g.rows() < 2)
    throw Error("expected a square matrix of size >= 2");
  if (!g.allFinite()) throw Error("matrix has non-finite entries");
}

inline void require_invertible(const Mat& g, const Tolerances& tol = {}) {
  require_square(g);
  if (std::abs(g.determinant()) <= tol.eps_equal) throw NotInvertible();
}

// ---------------------------------------------------------------------------
// ProjPoint
// ---------------------------------------------------------------------------

/// A point of RP^n stored by its canonical representative: the largest
/// coordinate in absolute value is +-1 and the first nonzero coordinate is
/// positive.
class ProjPoint {
 public:
  ProjPoint() = default;

  explicit ProjPoint(const Vec& v) {
    if (v.size() < 2) throw Error("projective point needs at least 2 coordinates");
    if (!v.allFinite()) throw Error("projective point has non-finite coordinates");
    const double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0) throw Error("projective point cannot be the zero vector");
    coords_ = v / m;
    for (int i = 0; i < coords_.size(); ++i) {
      if (std::abs(coords_(i)) > 1e-12) {
        if (coords_(i) < 0) coords_ = -coords_;
        break;
      }
    }
  }

  const Vec& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }

  /// Unit-norm representative with the same orientation as coords().
  Vec unit() const { return coords_.normalized(); }

  /// Equality after sign alignment.
  bool approx_equal(const ProjPoint& o, double tol) const {
    if (o.dim() != dim()) return false;
    return std::min((coords_ - o.coords_).cwiseAbs().maxCoeff(),
                    (coords_ + o.coords_).cwiseAbs().maxCoeff()) <= tol;
  }

 private:
  Vec coords_;
};

/// Angle between the lines spanned by two nonzero vectors, in [0, pi/2].
inline double projective_distance(const Vec& a, const Vec& b) {
  const Vec ua = a.normalized();
  const Vec ub = b.normalized();
  const double c = std::abs(ua.dot(ub));
  const double s = (ub - ua.dot(ub) * ua).norm();
  return std::atan2(s, c);
}

inline double projective_distance(const ProjPoint& a, const ProjPoint& b) {
  return projective_distance(a.coords(), b.coords());
}

// ---------------------------------------------------------------------------
// DualFunctional
// ---------------------------------------------------------------------------

/// A nonzero linear functional on R^{n+1}, stored as its covector.
class DualFunctional {
 public:
  DualFunctional() = default;
  explicit DualFunctional(Vec covector) : covector_(std::move(covector)) {
    if (covector_.size() < 2 || !covector_.allFinite() || covector_.norm() == 0.0)
      throw Error("dual functional must be a finite nonzero covector");
  }

  const Vec& covector() const { return covector_; }
  int dim() const { return static_cast<int>(covector_.size()); }
  double operator()(const Vec& v) const { return covector_.dot(v); }
  DualFunctional normalized() const { return DualFunctional(covector_.normalized()); }
  DualFunctional scaled(double s) const { return DualFunctional(covector_ * s); }

 private:
  Vec covector_;
};

// ---------------------------------------------------------------------------
// Group-theoretic primitives
// ---------------------------------------------------------------------------

/// phi o g^{-1}; satisfies <dual_action(g, phi), g v> = <phi, v>.
inline DualFunctional dual_action(const Mat& g, const DualFunctional& phi,
                                  const Tolerances& tol = {}) {
  require_invertible(g, tol);
  if (phi.dim() != g.rows()) throw Error("dimension mismatch in dual_action");
  Vec out = g.transpose().partialPivLu().solve(phi.covector());
  return DualFunctional(std::move(out));
}

/// Inverse transpose.
inline Mat cartan_involution(const Mat& g, const Tolerances& tol = {}) {
  require_invertible(g, tol);
  return g.inverse().transpose();
}

/// g / |det g|^{1/(n+1)}.
inline Mat unit_determinant_lift(const Mat& g, const Tolerances& tol = {}) {
  require_invertible(g, tol);
  const double d = std::abs(g.determinant());
  // already unimodular up to rounding: keep the entries, so lifting is idempotent
  if (std::abs(d - 1.0) <= 1e-12) return g;
  return g / std::pow(d, 1.0 / static_cast<double>(g.rows()));
}

// ---------------------------------------------------------------------------
// Spectral analysis
// ---------------------------------------------------------------------------

struct EigenInfo {
  Complex value;                  // cluster mean
  int algebraic = 0;
  int geometric = 0;
  std::vector<Vec> real_vectors;  // orthonormal kernel basis when value is real
  std::vector<Complex> members;   // raw eigenvalues in the cluster

  bool is_real(double tol) const { return std::abs(value.imag()) <= tol; }
  double modulus() const { return std::abs(value); }
};

namespace detail {

// Radius within which raw eigenvalues are treated as one cluster. A Jordan
// block of size k whose nilpotent part has norm about |g| spreads under
// rounding by about (u*|g|^(k-1))^(1/k); k <= dim.
inline double cluster_radius(const Mat& g, const Tolerances& tol) {
  const double u = std::numeric_limits<double>::epsilon();
  const double n = static_cast<double>(g.rows());
  const double spread = 10.0 * std::pow(u * std::pow(std::max(1.0, g.norm()), n - 1), 1.0 / n);
  return std::max(tol.eps_eig, spread);
}

inline double kernel_tol(const Mat& g, const Tolerances& tol) {
  return tol.eps_eig * std::max(1.0, g.norm());
}

}  // namespace detail

/// Eigenvalues with algebraic and geometric multiplicities, sorted by modulus
/// descending. Raw eigenvalues are clustered so that rounding splits of a
/// defective eigenvalue are reported as a single eigenvalue.
inline std::vector<EigenInfo> spectral(const Mat& g, const Tolerances& tol = {}) {
  require_square(g);
  const int n = static_cast<int>(g.rows());
  Eigen::EigenSolver<Mat> es(g, false);
  std::vector<Complex> raw(es.eigenvalues().data(), es.eigenvalues().data() + n);

  const double radius = detail::cluster_radius(g, tol);
  // single-linkage clustering
  std::vector<int> label(n, -1);
  int nclusters = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = nclusters;
    std::vector<int> stack{i};
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        if (label[b] < 0 &&
            std::abs(raw[a] - raw[b]) <= radius * std::max(1.0, std::abs(raw[a]))) {
          label[b] = nclusters;
          stack.push_back(b);
        }
      }
    }
    ++nclusters;
  }

  std::vector<EigenInfo> out(nclusters);
  for (int i = 0; i < n; ++i) {
    out[label[i]].members.push_back(raw[i]);
    out[label[i]].algebraic += 1;
  }
  const double ktol = detail::kernel_tol(g, tol);
  for (auto& e : out) {
    Complex sum = 0;
    for (auto& m : e.members) sum += m;
    e.value = sum / static_cast<double>(e.members.size());
    if (std::abs(e.value.imag()) <= radius) {
      e.value = Complex(e.value.real(), 0.0);
      Mat shifted = g - e.value.real() * Mat::Identity(n, n);
      Mat k = linalg::null_space(shifted, ktol);
      e.geometric = std::min<int>(static_cast<int>(k.cols()), e.algebraic);
      for (int c = 0; c < e.geometric; ++c) e.real_vectors.push_back(k.col(c));
    } else {
      CMat shifted = g.cast<Complex>() - e.value * CMat::Identity(n, n);
      CMat k = linalg::null_space(shifted, ktol);
      e.geometric = std::min<int>(static_cast<int>(k.cols()), e.algebraic);
    }
    e.geometric = std::max(e.geometric, 1);
  }
  std::sort(out.begin(), out.end(), [](const EigenInfo& a, const EigenInfo& b) {
    if (std::abs(a.modulus() - b.modulus()) > 1e-12) return a.modulus() > b.modulus();
    return std::arg(a.value) > std::arg(b.value);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Lorentz embeddings
// ---------------------------------------------------------------------------

/// Gram matrix of the Lorentz form x_1^2 + ... + x_n^2 - x_{n+1}^2.
inline Mat lorentz_gram(int dim) {
  Mat q = Mat::Identity(dim, dim);
  q(dim - 1, dim - 1) = -1.0;
  return q;
}

/// SL(2,R) -> SO(2,1) through the action g X g^T on symmetric matrices
/// X = [[x3 + x1, x2], [x2, x3 - x1]], whose determinant is x3^2 - x1^2 - x2^2.
inline Mat lorentz_embedding(const Eigen::Matrix2d& g, const Tolerances& tol = {}) {
  if (!g.allFinite() || std::abs(std::abs(g.determinant()) - 1.0) > tol.eps_equal)
    throw Error("lorentz_embedding requires |det| = 1");
  auto to_sym = [](const Eigen::Vector3d& x) {
    Eigen::Matrix2d m;
    m << x(2) + x(0), x(1), x(1), x(2) - x(0);
    return m;
  };
  auto from_sym = [](const Eigen::Matrix2d& m) {
    return Eigen::Vector3d(0.5 * (m(0, 0) - m(1, 1)), 0.5 * (m(0, 1) + m(1, 0)),
                           0.5 * (m(0, 0) + m(1, 1)));
  };
  Mat out(3, 3);
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d e = Eigen::Vector3d::Unit(c);
    out.col(c) = from_sym(g * to_sym(e) * g.transpose());
  }
  return out;
}

/// SL(2,C) -> SO(3,1) through g H g^* on Hermitian matrices
/// H = [[x4 + x1, x2 + i x3], [x2 - i x3, x4 - x1]].
inline Mat lorentz_embedding(const Eigen::Matrix2cd& g, const Tolerances& tol = {}) {
  if (!g.allFinite() || std::abs(std::abs(g.determinant()) - 1.0) > tol.eps_equal)
    throw Error("lorentz_embedding requires |det| = 1");
  const Complex i(0.0, 1.0);
  auto to_herm = [&](const Eigen::Vector4d& x) {
    Eigen::Matrix2cd m;
    m << x(3) + x(0), x(1) + i * x(2), x(1) - i * x(2), x(3) - x(0);
    return m;
  };
  auto from_herm = [](const Eigen::Matrix2cd& m) {
    return Eigen::Vector4d(0.5 * (m(0, 0) - m(1, 1)).real(), m(0, 1).real(),
                           m(0, 1).imag(), 0.5 * (m(0, 0) + m(1, 1)).real());
  };
  Mat out(4, 4);
  for (int c = 0; c < 4; ++c) {
    Eigen::Vector4d e = Eigen::Vector4d::Unit(c);
    out.col(c) = from_herm(g * to_herm(e) * g.adjoint());
  }
  return out;
}

}  // namespace projcell
