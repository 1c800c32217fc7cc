#pragma once

#include "projcell/projcell.hpp"

#include <random>
#include <string>

namespace fixtures {

using namespace projcell;

inline std::string data(const std::string& name) { return std::string(PROJCELL_DATA_DIR) + "/" + name; }

inline const Representation& torus() {
  static const Representation r = io::load_representation(data("modular_torus.json"));
  return r;
}

inline const Representation& figure_eight() {
  static const Representation r = io::load_representation(data("figure_eight.json"));
  return r;
}

inline const CellDecomposition& torus_decomposition() {
  static const CellDecomposition d =
      epstein_penner(torus(), ConeModel::lorentz(3), {1.0}, 8);
  return d;
}

inline const CellDecomposition& figure_eight_decomposition() {
  static const CellDecomposition d =
      epstein_penner(figure_eight(), ConeModel::lorentz(4), {1.0}, 6);
  return d;
}

inline Mat random_matrix(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

inline Vec random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

/// exp(eps X) for a random traceless X with unit Frobenius norm.
inline Mat random_sl_exp(int n, double eps, std::mt19937_64& rng) {
  Mat X = random_matrix(n, rng);
  X -= (X.trace() / n) * Mat::Identity(n, n);
  X /= X.norm();
  Mat E = Mat::Identity(n, n), term = Mat::Identity(n, n);
  for (int k = 1; k < 20; ++k) {
    term = term * (eps * X) / static_cast<double>(k);
    E += term;
  }
  return E;
}

/// Random interior point of the standard Lorentz cone in dimension n.
inline Vec lorentz_interior(int n, std::mt19937_64& rng, double max_ratio = 0.9) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec d = random_vector(n - 1, rng).normalized();
  Vec x(n);
  x.head(n - 1) = d * max_ratio * u(rng);
  x(n - 1) = 1.0;
  return x * (0.5 + 2.0 * u(rng));
}

/// Random nonzero point of the standard Lorentz lightcone.
inline Vec lorentz_null(int n, std::mt19937_64& rng, double norm = 1.0) {
  Vec d = random_vector(n - 1, rng).normalized();
  Vec x(n);
  x.head(n - 1) = d;
  x(n - 1) = 1.0;
  return x * (norm / std::sqrt(2.0));
}

/// Hyperbolic path of the once-punctured torus keeping the commutator
/// parabolic: tr a = 3 + s, tr b = 3, tr ab from x^2 + y^2 + z^2 = xyz.
/// The 2x2 matrix a is found by Gauss-Newton from the base matrix.
inline Representation torus_path(double s) {
  const Eigen::Matrix2d b0 = (Eigen::Matrix2d() << 1, -1, -1, 2).finished();
  Eigen::Matrix2d a = (Eigen::Matrix2d() << 1, 1, 1, 2).finished();
  const double x = 3.0 + s;
  const double z = 0.5 * (3.0 * x - std::sqrt(5.0 * x * x - 36.0));
  for (int it = 0; it < 100; ++it) {
    Eigen::Vector3d r(a.trace() - x, (a * b0).trace() - z, a.determinant() - 1.0);
    if (r.norm() < 1e-15) break;
    Eigen::Matrix<double, 3, 4> J;
    // unknowns a00, a01, a10, a11
    J.row(0) << 1, 0, 0, 1;
    J.row(1) << b0(0, 0), b0(1, 0), b0(0, 1), b0(1, 1);
    J.row(2) << a(1, 1), -a(1, 0), -a(0, 1), a(0, 0);
    Eigen::Vector4d step = J.transpose() * (J * J.transpose()).ldlt().solve(r);
    a(0, 0) -= step(0);
    a(0, 1) -= step(1);
    a(1, 0) -= step(2);
    a(1, 1) -= step(3);
  }
  std::map<char, Mat> gens{{'a', lorentz_embedding(a)}, {'b', lorentz_embedding(b0)}};
  Representation r(gens, {}, torus().cusps());
  r.set_lorentz_embedding("real");
  return r;
}

}  // namespace fixtures
