#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library: each oracle recomputes its quantity from first principles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Characteristic functions
// ---------------------------------------------------------------------------

/// Integral of exp(-<psi, x>) over the positive orthant, coordinate by coordinate.
inline double orthant_f(const Vec& x) {
  double v = 1.0;
  for (int i = 0; i < x.size(); ++i) v /= x(i);
  return v;
}

/// x_N^2 - |x'|^2.
inline double lorentz_q(const Vec& x) {
  const int N = static_cast<int>(x.size());
  return x(N - 1) * x(N - 1) - x.head(N - 1).squaredNorm();
}

/// Monte-Carlo estimate of the integral of exp(-<psi, x>) over the dual of
/// {x_N > |x'|} (the same cone). psi_N is drawn from Gamma(N, rate
/// x_N - |x'|) and psi' uniformly from the ball of radius psi_N; the
/// importance weight is then bounded by the normalizing constant.
inline double lorentz_f_monte_carlo(const Vec& x, long samples, unsigned seed) {
  const int N = static_cast<int>(x.size());
  const int k = N - 1;
  const double xr = x.head(k).norm();
  const double rate = x(N - 1) - xr;
  const double ball = std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
  const double norm = ball * std::tgamma(static_cast<double>(N)) / std::pow(rate, N);
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gam(static_cast<double>(N), 1.0 / rate);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum = 0.0;
  Vec dir(k);
  for (long s = 0; s < samples; ++s) {
    const double t = gam(rng);
    for (int i = 0; i < k; ++i) dir(i) = gauss(rng);
    const double r = t * std::pow(unif(rng), 1.0 / k);
    const double dot = r * dir.normalized().dot(x.head(k));
    sum += std::exp(-dot - t * xr);
  }
  return norm * sum / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Lorentz transformations built from rotations and boosts
// ---------------------------------------------------------------------------

/// Rotation by `angle` in the plane of spatial axes i, j (time axis last).
inline Mat rotation(int dim, int i, int j, double angle) {
  Mat m = Mat::Identity(dim, dim);
  m(i, i) = std::cos(angle);
  m(j, j) = std::cos(angle);
  m(i, j) = -std::sin(angle);
  m(j, i) = std::sin(angle);
  return m;
}

/// Boost with rapidity `r` along spatial axis i.
inline Mat boost(int dim, int i, double r) {
  Mat m = Mat::Identity(dim, dim);
  const int t = dim - 1;
  m(i, i) = std::cosh(r);
  m(t, t) = std::cosh(r);
  m(i, t) = std::sinh(r);
  m(t, i) = std::sinh(r);
  return m;
}

/// Random element of the identity component of SO(dim-1, 1).
inline Mat random_lorentz(int dim, std::mt19937_64& rng, double max_rapidity = 1.0) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> rap(-max_rapidity, max_rapidity);
  Mat m = Mat::Identity(dim, dim);
  for (int rep = 0; rep < 2; ++rep) {
    for (int i = 0; i + 1 < dim - 1; ++i) m = m * rotation(dim, i, i + 1, ang(rng));
    for (int i = 0; i < dim - 1; ++i) m = m * boost(dim, i, rap(rng));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Farey slopes for lightcone vectors of the symmetric-matrix model
// ---------------------------------------------------------------------------

/// Best rational approximation p/q of r by continued fractions, stopping at
/// relative accuracy `tol`.
inline std::pair<long, long> to_fraction(double r, double tol = 1e-8, long max_den = 100000000) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = r;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(x);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(r - static_cast<double>(p1) / static_cast<double>(q1)) <= tol * std::max(1.0, std::abs(r)))
      break;
    const double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return {p1, q1};
}

/// A null vector x of x3^2 - x1^2 - x2^2 is the symmetric matrix
/// [[x3 + x1, x2], [x2, x3 - x1]] = lambda v v^T; returns v = (p, q) as a
/// primitive integer pair with q >= 0 (slope p/q).
inline std::pair<long, long> slope(const Vec& x) {
  const double a = x(2) + x(0), c = x(2) - x(0), b = x(1);
  // a column of the rank-one matrix, the one with the larger diagonal entry
  const double v0 = std::abs(a) >= std::abs(c) ? a : b;
  const double v1 = std::abs(a) >= std::abs(c) ? b : c;
  long p, q;
  if (std::abs(v0) >= std::abs(v1)) {
    auto [n, d] = to_fraction(v1 / v0, 1e-7);
    p = d;
    q = n;
  } else {
    auto [n, d] = to_fraction(v0 / v1, 1e-7);
    p = n;
    q = d;
  }
  if (q < 0 || (q == 0 && p < 0)) {
    p = -p;
    q = -q;
  }
  const long g = std::gcd(std::labs(p), std::labs(q));
  return {p / g, q / g};
}

inline bool farey_neighbors(std::pair<long, long> a, std::pair<long, long> b) {
  return std::labs(a.first * b.second - a.second * b.first) == 1;
}

// ---------------------------------------------------------------------------
// Exhaustive convex hull
// ---------------------------------------------------------------------------

inline void combinations(int n, int k, std::vector<int>& cur, int start,
                         std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, cur, i + 1, out);
    cur.pop_back();
  }
}

/// Sorted index list of the 2-D points' convex hull vertices (monotone chain).
inline std::vector<int> hull_2d(const std::vector<Eigen::Vector2d>& pts, double tol) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  auto cross = [&](int o, int a, int b) {
    return (pts[a] - pts[o]).x() * (pts[b] - pts[o]).y() - (pts[a] - pts[o]).y() * (pts[b] - pts[o]).x();
  };
  std::vector<int> h;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = h.size();
    for (int i : idx) {
      while (h.size() >= base + 2 && cross(h[h.size() - 2], h.back(), i) <= tol) h.pop_back();
      h.push_back(i);
    }
    h.pop_back();
    std::reverse(idx.begin(), idx.end());
  }
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return h;
}

/// Facets of the hull of points in R^d by testing every d-subset's
/// hyperplane. Each facet is returned as its sorted extreme-point indices;
/// for d = 3 coplanar points are reduced to the vertices of their polygon,
/// for d > 3 the points are assumed in general position.
inline std::set<std::vector<int>> brute_force_facets(const std::vector<Vec>& pts, double tol) {
  const int n = static_cast<int>(pts.size());
  const int d = static_cast<int>(pts[0].size());
  std::vector<std::vector<int>> subsets;
  std::vector<int> cur;
  combinations(n, d, cur, 0, subsets);
  std::set<std::vector<int>> out;
  for (const auto& s : subsets) {
    Mat A(d - 1, d);
    for (int i = 1; i < d; ++i) A.row(i - 1) = (pts[s[i]] - pts[s[0]]).transpose();
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.rank() < d - 1) continue;
    Mat ker = lu.kernel();
    if (ker.cols() != 1) continue;
    Vec nrm = ker.col(0).normalized();
    const double off = nrm.dot(pts[s[0]]);
    int above = 0, below = 0;
    std::vector<int> on;
    for (int i = 0; i < n; ++i) {
      const double v = nrm.dot(pts[i]) - off;
      if (v > tol) ++above;
      else if (v < -tol) ++below;
      else on.push_back(i);
    }
    if (above > 0 && below > 0) continue;
    if (d == 3 && on.size() > 3) {
      // extreme points within the plane
      Vec u = (pts[on[1]] - pts[on[0]]).normalized();
      Vec w = Eigen::Vector3d(nrm).cross(Eigen::Vector3d(u));
      std::vector<Eigen::Vector2d> flat;
      for (int i : on) {
        Vec r = pts[i] - pts[on[0]];
        flat.emplace_back(r.dot(u), r.dot(w));
      }
      std::vector<int> keep;
      for (int k : hull_2d(flat, tol)) keep.push_back(on[k]);
      on = keep;
    }
    std::sort(on.begin(), on.end());
    out.insert(on);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

/// Reduced words of length <= L in a free group on r generators.
inline long free_group_ball(int r, int L) {
  long total = 1, layer = 2 * r;
  for (int k = 1; k <= L; ++k) {
    total += layer;
    layer *= 2 * r - 1;
  }
  return total;
}

/// Points of Z^2 with |a| + |b| <= L.
inline long l1_ball_points(int L) {
  long c = 0;
  for (int a = -L; a <= L; ++a)
    for (int b = -L; b <= L; ++b)
      if (std::abs(a) + std::abs(b) <= L) ++c;
  return c;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

template <class F>
Vec fd_gradient(F&& f, const Vec& x, double h) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

template <class F>
Mat fd_hessian(F&& f, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Mat H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto at = [&](double si, double sj) {
        Vec y = x;
        y(i) += si * h;
        y(j) += sj * h;
        return f(y);
      };
      H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
    }
  return 0.5 * (H + H.transpose());
}

}  // namespace oracle
