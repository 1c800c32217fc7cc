#pragma once

// Holonomy representations, word evaluation, element and orbit enumeration,
// parabolicity, fixed points and cusp validation.

#include "projcell/core.hpp"
#include "projcell/word.hpp"

#include <map>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>

namespace projcell {

struct CuspWords {
  std::string name;
  std::vector<std::string> words;
  std::optional<Vec> fixed_point;
};

struct GroupElement {
  std::string word;
  Mat matrix;
};

class Representation {
 public:
  Representation() = default;

  /// Generators are keyed by single lowercase letters. Each is replaced by
  /// its unit-determinant lift; relators must evaluate to +-I.
  Representation(std::map<char, Mat> generators, std::vector<std::string> relators = {},
                 std::vector<CuspWords> cusps = {}, const Tolerances& tol = {})
      : relators_(std::move(relators)), cusps_(std::move(cusps)), tol_(tol) {
    tol_.validate();
    if (generators.empty()) throw Error("representation needs at least one generator");
    dim_ = -1;
    for (auto& [name, g] : generators) {
      if (!std::islower(static_cast<unsigned char>(name)))
        throw Error(std::string("generator name must be a lowercase letter: ") + name);
      require_invertible(g, tol_);
      if (dim_ < 0) dim_ = static_cast<int>(g.rows());
      if (g.rows() != dim_) throw Error("generators of different sizes");
      if (g.determinant() < 0)
        notes_.push_back(std::string("generator ") + name + " has negative determinant");
      Mat u = unit_determinant_lift(g, tol_);
      names_.push_back(name);
      mats_[name] = u;
      mats_[word::inverse_letter(name)] = u.inverse();
    }
    for (const auto& r : relators_) {
      check_word(r);
      Mat m = eval(r);
      const Mat id = Mat::Identity(dim_, dim_);
      const double scale = std::max(1.0, m.norm());
      const double err = std::min((m - id).cwiseAbs().maxCoeff(), (m + id).cwiseAbs().maxCoeff());
      if (err > tol_.eps_equal * scale * 100)
        throw Error("relator " + r + " does not evaluate to +-identity (error " +
                    std::to_string(err) + ")");
    }
    for (const auto& c : cusps_) {
      if (c.words.empty()) throw Error("cusp " + c.name + " has no words");
      for (const auto& w : c.words) check_word(w);
    }
  }

  int dim() const { return dim_; }
  const std::vector<char>& names() const { return names_; }
  const std::vector<std::string>& relators() const { return relators_; }
  const std::vector<CuspWords>& cusps() const { return cusps_; }
  std::vector<CuspWords>& mutable_cusps() { return cusps_; }
  const std::vector<std::string>& notes() const { return notes_; }
  const Tolerances& tolerances() const { return tol_; }
  const std::string& lorentz_embedding() const { return embedding_; }
  void set_lorentz_embedding(std::string e) { embedding_ = std::move(e); }

  const Mat& generator(char c) const {
    auto it = mats_.find(c);
    if (it == mats_.end()) throw Error(std::string("unknown generator letter: ") + c);
    return it->second;
  }

  /// All letters: generators followed by their inverses.
  std::vector<char> letters() const {
    std::vector<char> out(names_);
    for (char c : names_) out.push_back(word::inverse_letter(c));
    return out;
  }

  void check_word(const std::string& w) const {
    for (char c : w) {
      if (c == ' ') continue;
      if (!mats_.count(c)) throw Error("word '" + w + "' uses unknown letter " + c);
    }
  }

  Mat eval(const std::string& w) const {
    Mat m = Mat::Identity(dim_, dim_);
    for (char c : w) {
      if (c == ' ') continue;
      m = m * generator(c);
    }
    return m;
  }

  /// Same presentation with generators conjugated by h.
  Representation conjugated(const Mat& h) const {
    Mat hi = h.inverse();
    std::map<char, Mat> gens;
    for (char c : names_) gens[c] = h * generator(c) * hi;
    std::vector<CuspWords> cusps = cusps_;
    for (auto& c : cusps)
      if (c.fixed_point) c.fixed_point = Vec(h * *c.fixed_point);
    Representation r(gens, relators_, cusps, tol_);
    r.embedding_ = embedding_;
    return r;
  }

  /// Same presentation with the given generator matrices replaced.
  Representation with_generators(const std::map<char, Mat>& replace, bool keep_relators) const {
    std::map<char, Mat> gens;
    for (char c : names_) gens[c] = generator(c);
    for (auto& [c, m] : replace) {
      if (!gens.count(c)) throw Error(std::string("unknown generator ") + c);
      gens[c] = m;
    }
    return Representation(gens, keep_relators ? relators_ : std::vector<std::string>{}, cusps_,
                          tol_);
  }

 private:
  int dim_ = 0;
  std::vector<char> names_;
  std::map<char, Mat> mats_;
  std::vector<std::string> relators_;
  std::vector<CuspWords> cusps_;
  std::vector<std::string> notes_;
  std::string embedding_;
  Tolerances tol_;
};

/// Max over generators of the Frobenius distance, after sign alignment.
inline double generator_distance(const Representation& a, const Representation& b) {
  if (a.names() != b.names()) throw Error("representations have different generators");
  double d = 0;
  for (char c : a.names()) {
    const Mat& x = a.generator(c);
    const Mat& y = b.generator(c);
    d = std::max(d, std::min((x - y).norm(), (x + y).norm()));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

namespace detail {

// Index of matrices up to sign, keyed by a random linear projection.
class MatrixIndex {
 public:
  MatrixIndex(int dim, double tol) : tol_(tol) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    weights_ = Mat(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) weights_(i, j) = u(rng) * ((i + j) % 2 ? -1.0 : 1.0);
  }

  // Returns existing index or -1.
  int find(const Mat& m, const std::vector<Mat>& store) const {
    const double h = key(m);
    const long long b = bucket(h);
    for (long long k = b - 1; k <= b + 1; ++k) {
      auto it = buckets_.find(k);
      if (it == buckets_.end()) continue;
      for (int idx : it->second) {
        const Mat& s = store[idx];
        const double scale = std::max(1.0, std::max(s.cwiseAbs().maxCoeff(), m.cwiseAbs().maxCoeff()));
        const double err = std::min((s - m).cwiseAbs().maxCoeff(), (s + m).cwiseAbs().maxCoeff());
        if (err <= tol_ * scale) return idx;
      }
    }
    return -1;
  }

  void insert(const Mat& m, int idx) { buckets_[bucket(key(m))].push_back(idx); }

 private:
  double key(const Mat& m) const { return std::abs(weights_.cwiseProduct(m).sum()); }
  long long bucket(double h) const { return static_cast<long long>(std::floor(h / 1e-5)); }

  Mat weights_;
  double tol_;
  std::unordered_map<long long, std::vector<int>> buckets_;
};

}  // namespace detail

struct Enumeration {
  std::vector<GroupElement> elements;   // identity first, then by word length
  std::vector<std::size_t> layer_start;  // elements of length k: [layer_start[k], layer_start[k+1])
  std::vector<GroupElement> pruned;      // first-found elements over the norm bound
  int max_word_length = 0;
  double max_matrix_norm = 0;

  std::size_t size() const { return elements.size(); }
  // elements whose word has exactly the maximal length
  std::vector<const GroupElement*> last_layer() const {
    std::vector<const GroupElement*> out;
    if (layer_start.size() < 2) return out;
    for (std::size_t i = layer_start[layer_start.size() - 2]; i < layer_start.back(); ++i)
      out.push_back(&elements[i]);
    return out;
  }
};

/// Breadth-first closure under right multiplication by generators and their
/// inverses. Matrices equal up to sign within eps_equal are identified.
inline Enumeration enumerate_elements(const Representation& rep, int max_word_length,
                                      double max_matrix_norm = 1e3) {
  if (max_word_length < 0) throw Error("max_word_length must be nonnegative");
  const int n = rep.dim();
  const auto letters = rep.letters();
  Enumeration out;
  out.max_word_length = max_word_length;
  out.max_matrix_norm = max_matrix_norm;
  std::vector<Mat> store;
  detail::MatrixIndex index(n, rep.tolerances().eps_equal * 100);
  auto add = [&](const std::string& w, const Mat& m) {
    store.push_back(m);
    index.insert(m, static_cast<int>(store.size() - 1));
    out.elements.push_back({w, m});
  };
  add("", Mat::Identity(n, n));
  out.layer_start = {0, 1};
  std::vector<Mat> pruned_store;
  detail::MatrixIndex pruned_index(n, rep.tolerances().eps_equal * 100);
  for (int len = 1; len <= max_word_length; ++len) {
    const std::size_t lo = out.layer_start[len - 1], hi = out.layer_start[len];
    for (std::size_t i = lo; i < hi; ++i) {
      const std::string w = out.elements[i].word;
      const Mat g = out.elements[i].matrix;
      for (char c : letters) {
        if (!w.empty() && w.back() == word::inverse_letter(c)) continue;
        Mat m = g * rep.generator(c);
        if (index.find(m, store) >= 0) continue;
        if (m.norm() > max_matrix_norm) {
          if (pruned_index.find(m, pruned_store) < 0) {
            pruned_store.push_back(m);
            pruned_index.insert(m, static_cast<int>(pruned_store.size() - 1));
            out.pruned.push_back({w + c, m});
          }
          continue;
        }
        add(w + c, m);
      }
    }
    out.layer_start.push_back(out.elements.size());
  }
  return out;
}

struct OrbitPoint {
  Vec x;
  std::string word;
};

/// Images g.p for the given elements, deduplicated as vectors within eps_equal.
inline std::vector<OrbitPoint> orbit(const Vec& p, const std::vector<GroupElement>& elements,
                                     const Tolerances& tol = {}) {
  if (p.norm() == 0) throw Error("orbit of the zero vector");
  std::vector<OrbitPoint> out;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Vec w(p.size());
  for (int i = 0; i < w.size(); ++i) w(i) = u(rng);
  std::unordered_map<long long, std::vector<int>> buckets;
  for (const auto& e : elements) {
    Vec x = e.matrix * p;
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    const double h = w.dot(x);
    const long long b = static_cast<long long>(std::floor(h / 1e-5));
    bool dup = false;
    for (long long k = b - 1; k <= b + 1 && !dup; ++k) {
      auto it = buckets.find(k);
      if (it == buckets.end()) continue;
      for (int idx : it->second)
        if ((out[idx].x - x).cwiseAbs().maxCoeff() <= tol.eps_equal * scale * 100) {
          dup = true;
          break;
        }
    }
    if (dup) continue;
    buckets[b].push_back(static_cast<int>(out.size()));
    out.push_back({x, e.word});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parabolics and fixed points
// ---------------------------------------------------------------------------

inline bool is_parabolic(const Mat& g, const Tolerances& tol = {}) {
  auto sp = spectral(g, tol);
  bool defective = false;
  for (const auto& e : sp) {
    if (std::abs(e.modulus() - 1.0) > tol.eps_eig) return false;
    if (e.geometric < e.algebraic) defective = true;
  }
  return defective;
}

/// The fixed direction at the top of the longest Jordan chain of the
/// defective modulus-one eigenvalue.
inline ProjPoint parabolic_fixed_point(const Mat& g, const Tolerances& tol = {}) {
  if (!is_parabolic(g, tol)) throw Error("matrix is not parabolic");
  auto sp = spectral(g, tol);
  const EigenInfo* best = nullptr;
  for (const auto& e : sp) {
    if (!e.is_real(detail::cluster_radius(g, tol))) continue;
    if (e.geometric >= e.algebraic) continue;
    if (!best || e.algebraic - e.geometric > best->algebraic - best->geometric ||
        (e.algebraic - e.geometric == best->algebraic - best->geometric &&
         e.algebraic > best->algebraic))
      best = &e;
  }
  if (!best) throw Error("parabolic matrix has no real defective eigenvalue");
  const int n = static_cast<int>(g.rows());
  const Mat N = g - best->value.real() * Mat::Identity(n, n);
  const double nn = std::max(1.0, N.norm());
  // chain length k: ranks of N^j stabilize at j = k
  std::vector<int> ranks{n};
  Mat P = Mat::Identity(n, n);
  for (int j = 1; j <= n; ++j) {
    P = P * N;
    ranks.push_back(linalg::rank(P, tol.eps_eig * std::pow(nn, j)));
    if (ranks[j] == ranks[j - 1]) break;
  }
  int k = static_cast<int>(ranks.size()) - 1;
  if (ranks[k] == ranks[k - 1]) --k;  // k = first j with stabilized rank
  Mat top = Mat::Identity(n, n);
  for (int j = 0; j < k - 1; ++j) top = top * N;
  Mat range = linalg::range(top, tol.eps_eig * std::pow(nn, std::max(0, k - 1)));
  Mat ker = linalg::null_space(N, detail::kernel_tol(g, tol));
  Mat fixed = linalg::intersect(range, ker, 1e-5);
  if (fixed.cols() != 1) {
    // fall back on the range alone when the kernel estimate is too coarse
    Mat r2 = linalg::intersect(ker, range, 1e-3);
    if (r2.cols() != 1) throw Error("parabolic fixed point is not unique");
    fixed = r2;
  }
  return ProjPoint(fixed.col(0));
}

struct FixedPoint {
  ProjPoint point;
  bool isolated = true;
  int dimension = 1;  // dimension of the common eigenspace
  Mat basis;
};

namespace detail {

// Orthonormal bases of the real eigenspaces of g.
inline std::vector<Mat> real_eigenspaces(const Mat& g, const Tolerances& tol) {
  std::vector<Mat> out;
  const int n = static_cast<int>(g.rows());
  const double radius = cluster_radius(g, tol);
  for (const auto& e : spectral(g, tol)) {
    if (!e.is_real(radius)) continue;
    if (!e.real_vectors.empty()) {
      Mat b(n, e.real_vectors.size());
      for (std::size_t i = 0; i < e.real_vectors.size(); ++i) b.col(i) = e.real_vectors[i];
      out.push_back(b);
      continue;
    }
    for (const auto& m : e.members) {
      if (std::abs(m.imag()) > radius) continue;
      Mat k = linalg::null_space(Mat(g - m.real() * Mat::Identity(n, n)),
                                 kernel_tol(g, tol) * 10);
      if (k.cols() > 0) out.push_back(k.leftCols(1));
    }
  }
  return out;
}

}  // namespace detail

/// Common eigen-directions of all matrices. Each returned entry is a common
/// eigenspace; one-dimensional ones are isolated fixed points.
inline std::vector<FixedPoint> common_fixed_points(const std::vector<Mat>& mats,
                                                   const Tolerances& tol = {}) {
  if (mats.empty()) throw Error("common_fixed_points needs at least one matrix");
  for (const auto& m : mats) require_square(m);
  std::vector<Mat> spaces = detail::real_eigenspaces(mats[0], tol);
  constexpr double kAngle = 1e-5;
  for (std::size_t i = 1; i < mats.size(); ++i) {
    auto eig = detail::real_eigenspaces(mats[i], tol);
    std::vector<Mat> next;
    for (const auto& s : spaces)
      for (const auto& e : eig) {
        Mat x = linalg::intersect(s, e, kAngle);
        if (x.cols() > 0) next.push_back(x);
      }
    spaces = std::move(next);
  }
  std::vector<FixedPoint> out;
  for (const auto& s : spaces) {
    FixedPoint f;
    f.point = ProjPoint(s.col(0));
    f.dimension = static_cast<int>(s.cols());
    f.isolated = f.dimension == 1;
    f.basis = s;
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cusp validation
// ---------------------------------------------------------------------------

struct CuspReport {
  std::string name;
  bool parabolic = false;          // every enumerated nontrivial element parabolic
  bool common_fixed_point = false;
  bool preserves_hyperplane = false;
  bool dual_eigenvalue_one = false;
  std::optional<ProjPoint> fixed_point;
  std::optional<Vec> phi;  // covector fixed by the dual action, vanishing at p
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks the cusp subgroup generated by the cusp words: parabolicity of
/// short elements, a common fixed point p, and a covector phi with phi(p) = 0
/// fixed (with eigenvalue 1) by the dual action of every generator.
inline CuspReport validate_cusp(const Representation& rep, const CuspWords& cusp,
                                int check_length = 3) {
  if (cusp.words.empty()) throw Error("cusp " + cusp.name + " has no words");
  for (const auto& w : cusp.words) rep.check_word(w);
  const Tolerances& tol = rep.tolerances();
  const int n = rep.dim();
  CuspReport r;
  r.name = cusp.name;
  std::vector<Mat> gens;
  for (const auto& w : cusp.words) gens.push_back(rep.eval(w));

  // enumerate the subgroup through a representation on cusp letters
  std::map<char, Mat> sub;
  for (std::size_t i = 0; i < gens.size() && i < 26; ++i) sub[static_cast<char>('a' + i)] = gens[i];
  Enumeration en = enumerate_elements(Representation(sub, {}, {}, tol), check_length, 1e12);
  r.parabolic = true;
  for (std::size_t i = 1; i < en.elements.size(); ++i) {
    const Mat& m = en.elements[i].matrix;
    if ((m - Mat::Identity(n, n)).norm() <= tol.eps_equal * 100 ||
        (m + Mat::Identity(n, n)).norm() <= tol.eps_equal * 100)
      continue;
    if (!is_parabolic(m, tol)) {
      r.parabolic = false;
      r.violations.push_back("element " + en.elements[i].word + " of cusp " + cusp.name +
                             " is not parabolic");
      break;
    }
  }

  // common fixed point
  std::optional<Vec> p;
  auto fps = common_fixed_points(gens, tol);
  std::vector<Vec> candidates;
  for (const auto& f : fps)
    for (int c = 0; c < f.basis.cols(); ++c) candidates.push_back(f.basis.col(c));
  if (cusp.fixed_point) {
    for (const auto& f : fps) {
      Vec proj = f.basis * (f.basis.transpose() * *cusp.fixed_point);
      if (proj.norm() > 0 && projective_distance(proj, *cusp.fixed_point) < 1e-6) p = proj;
    }
  } else {
    for (const auto& g : gens) {
      if (!is_parabolic(g, tol)) continue;
      try {
        Vec v = parabolic_fixed_point(g, tol).coords();
        bool all = true;
        for (const auto& h : gens) all = all && projective_distance(h * v, v) < 1e-6;
        if (all) {
          p = v;
          break;
        }
      } catch (const Error&) {
      }
    }
  }
  if (!p) {
    r.violations.push_back("cusp " + cusp.name + " has no common parabolic fixed point");
    return r;
  }
  r.common_fixed_point = true;
  r.fixed_point = ProjPoint(*p);

  // phi: kernel of stacked (g^{-T} - I) and p^T
  Mat stack(gens.size() * n + 1, n);
  for (std::size_t i = 0; i < gens.size(); ++i)
    stack.middleRows(i * n, n) = gens[i].inverse().transpose() - Mat::Identity(n, n);
  stack.row(gens.size() * n) = p->normalized().transpose();
  double scale = 1.0;
  for (const auto& g : gens) scale = std::max(scale, g.norm());
  Mat ker = linalg::null_space(stack, tol.eps_eig * scale);
  if (ker.cols() >= 1) {
    r.preserves_hyperplane = true;
    r.dual_eigenvalue_one = true;
    r.phi = Vec(ker.col(0));
    if (ker.cols() > 1)
      r.violations.push_back("cusp " + cusp.name + " fixes more than one supporting hyperplane");
    return r;
  }
  // projective preservation with eigenvalue != 1
  std::vector<Mat> duals;
  for (const auto& g : gens) duals.push_back(g.inverse().transpose());
  for (const auto& f : common_fixed_points(duals, tol)) {
    for (int c = 0; c < f.basis.cols(); ++c) {
      Vec phi = f.basis.col(c);
      if (std::abs(phi.dot(p->normalized())) < 1e-6) {
        r.preserves_hyperplane = true;
        r.phi = phi;
      }
    }
  }
  if (!r.preserves_hyperplane)
    r.violations.push_back("cusp " + cusp.name + " does not preserve a hyperplane through p");
  else
    r.violations.push_back("cusp " + cusp.name + " scales its supporting functional");
  return r;
}

}  // namespace projcell
