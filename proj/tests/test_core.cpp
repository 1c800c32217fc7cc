#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace projcell;
using fixtures::random_matrix;
using fixtures::random_vector;

namespace {

Mat diag3(double a, double b, double c) {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

}  // namespace

TEST(Tolerances, DefaultsAreOrdered) {
  Tolerances t;
  EXPECT_EQ(t.eps_equal, 1e-9);
  EXPECT_EQ(t.eps_geom, 1e-7);
  EXPECT_EQ(t.eps_eig, 1e-6);
  EXPECT_NO_THROW(t.validate());
  EXPECT_THROW((Tolerances{1e-3, 1e-7, 1e-6}.validate()), Error);
  EXPECT_THROW((Tolerances{0.0, 1e-7, 1e-6}.validate()), Error);
}

TEST(ProjPoint, CanonicalRepresentative) {
  Vec v(3);
  v << -2, 4, 1;
  ProjPoint p(v);
  EXPECT_DOUBLE_EQ(p.coords().cwiseAbs().maxCoeff(), 1.0);
  ProjPoint q(Vec(-3.0 * v));
  EXPECT_TRUE(p.approx_equal(q, 1e-12));
  EXPECT_LT((p.coords() - q.coords()).norm(), 1e-15);
  EXPECT_THROW(ProjPoint(Vec::Zero(3)), Error);
}

TEST(DualAction, IdentityAndDiagonal) {
  Vec phi(3);
  phi << 0.3, -1.2, 2.0;
  DualFunctional f(phi);
  EXPECT_LT((dual_action(Mat::Identity(3, 3), f).covector() - phi).norm(), 1e-15);
  Vec e1 = Vec::Unit(3, 0);
  Vec out = dual_action(diag3(2, 1, 0.5), DualFunctional(e1)).covector();
  EXPECT_NEAR(out(0), 0.5, 1e-15);
  EXPECT_NEAR(out(1), 0.0, 1e-15);
  EXPECT_NEAR(out(2), 0.0, 1e-15);
}

TEST(DualAction, PreservesPairingOnRandomSamples) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    Mat g = unit_determinant_lift(random_matrix(3, rng));
    Vec phi = random_vector(3, rng), v = random_vector(3, rng);
    DualFunctional f(phi);
    const double before = f(v);
    const double after = dual_action(g, f)(g * v);
    EXPECT_NEAR(after, before, 1e-12 * std::max(1.0, std::abs(before)) * g.norm() * g.inverse().norm());
  }
}

TEST(DualAction, IsAnAction) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 30; ++k) {
    Mat g = random_matrix(4, rng) + 3 * Mat::Identity(4, 4);
    Mat h = random_matrix(4, rng) + 3 * Mat::Identity(4, 4);
    DualFunctional f(random_vector(4, rng));
    Vec a = dual_action(g * h, f).covector();
    Vec b = dual_action(g, dual_action(h, f)).covector();
    EXPECT_LT((a - b).norm(), 1e-10 * std::max(1.0, a.norm()));
  }
}

TEST(DualAction, SingularMatrixRejected) {
  Mat g = Mat::Identity(3, 3);
  g(2, 2) = 0;
  try {
    dual_action(g, DualFunctional(Vec::Ones(3)));
    FAIL();
  } catch (const NotInvertible& e) {
    EXPECT_NE(std::string(e.what()).find("not invertible"), std::string::npos);
  }
}

TEST(CartanInvolution, Examples) {
  EXPECT_LT((cartan_involution(Mat::Identity(3, 3)) - Mat::Identity(3, 3)).norm(), 1e-15);
  Mat R = oracle::rotation(3, 0, 1, 0.7);
  EXPECT_LT((cartan_involution(R) - R).norm(), 1e-14);
  EXPECT_LT((cartan_involution(diag3(2, 1, 0.5)) - diag3(0.5, 1, 2)).norm(), 1e-15);
  EXPECT_THROW(cartan_involution(Mat::Zero(3, 3)), NotInvertible);
}

TEST(CartanInvolution, InvolutiveAutomorphism) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 30; ++k) {
    Mat g = random_matrix(3, rng) + 2 * Mat::Identity(3, 3);
    Mat h = random_matrix(3, rng) + 2 * Mat::Identity(3, 3);
    EXPECT_LT((cartan_involution(cartan_involution(g)) - g).norm(), 1e-10 * g.norm());
    Mat lhs = cartan_involution(g * h), rhs = cartan_involution(g) * cartan_involution(h);
    EXPECT_LT((lhs - rhs).norm(), 1e-9 * std::max(1.0, lhs.norm()));
  }
}

TEST(UnitDeterminantLift, Examples) {
  EXPECT_LT((unit_determinant_lift(Mat::Identity(3, 3)) - Mat::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((unit_determinant_lift(2 * Mat::Identity(3, 3)) - Mat::Identity(3, 3)).norm(), 1e-15);
  std::mt19937_64 rng(14);
  for (int k = 0; k < 20; ++k) {
    Mat g = random_matrix(4, rng);
    EXPECT_NEAR(std::abs(unit_determinant_lift(g).determinant()), 1.0, 1e-12);
  }
  Mat s = Mat::Identity(3, 3);
  s(1, 1) = 0;
  EXPECT_THROW(unit_determinant_lift(s), NotInvertible);
}

TEST(Spectral, Examples) {
  auto id = spectral(Mat::Identity(3, 3));
  ASSERT_EQ(id.size(), 1u);
  EXPECT_NEAR(id[0].value.real(), 1.0, 1e-12);
  EXPECT_EQ(id[0].algebraic, 3);
  EXPECT_EQ(id[0].geometric, 3);

  Mat J(3, 3);
  J << 1, 1, 0, 0, 1, 1, 0, 0, 1;
  auto sj = spectral(J);
  ASSERT_EQ(sj.size(), 1u);
  EXPECT_EQ(sj[0].algebraic, 3);
  EXPECT_EQ(sj[0].geometric, 1);

  auto sd = spectral(diag3(2, 1, 0.5));
  ASSERT_EQ(sd.size(), 3u);
  EXPECT_NEAR(sd[0].modulus(), 2.0, 1e-12);
  EXPECT_NEAR(sd[1].modulus(), 1.0, 1e-12);
  EXPECT_NEAR(sd[2].modulus(), 0.5, 1e-12);
}

TEST(Spectral, MultiplicitiesAndDeterminant) {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 40; ++k) {
    const int n = 3 + k % 3;
    Mat g = random_matrix(n, rng);
    auto sp = spectral(g);
    int total = 0;
    Complex prod = 1.0;
    for (const auto& e : sp) {
      total += e.algebraic;
      for (const auto& m : e.members) prod *= m;
    }
    EXPECT_EQ(total, n);
    EXPECT_NEAR(prod.real(), g.determinant(), 1e-9 * std::max(1.0, std::abs(g.determinant())));
    for (std::size_t i = 1; i < sp.size(); ++i) EXPECT_GE(sp[i - 1].modulus(), sp[i].modulus() - 1e-12);
  }
}

TEST(LorentzEmbedding, Examples) {
  EXPECT_LT((lorentz_embedding(Eigen::Matrix2d(Eigen::Matrix2d::Identity())) - Mat::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((lorentz_embedding(Eigen::Matrix2d(-Eigen::Matrix2d::Identity())) - Mat::Identity(3, 3)).norm(),
            1e-15);
  Eigen::Matrix2d d;
  d << 2, 0, 0, 0.5;
  Mat L = lorentz_embedding(d);
  // direct action on symmetric matrices: diag entries scale by 4 and 1/4
  const Mat Q = lorentz_gram(3);
  EXPECT_LT((L * Q * L.transpose() - Q).norm(), 1e-12);
  auto sp = spectral(L);
  ASSERT_EQ(sp.size(), 3u);
  EXPECT_NEAR(sp[0].modulus(), 4.0, 1e-12);
  EXPECT_NEAR(sp[1].modulus(), 1.0, 1e-12);
  EXPECT_NEAR(sp[2].modulus(), 0.25, 1e-12);
  Eigen::Matrix2d bad;
  bad << 2, 0, 0, 1;
  EXPECT_THROW(lorentz_embedding(bad), Error);
}

TEST(LorentzEmbedding, PreservesFormOnRandomInputs) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> g(0.0, 1.0);
  const Mat Q3 = lorentz_gram(3), Q4 = lorentz_gram(4);
  for (int k = 0; k < 100; ++k) {
    Eigen::Matrix2d a;
    a << g(rng), g(rng), g(rng), g(rng);
    a /= std::sqrt(std::abs(a.determinant()));
    if (a.determinant() < 0) a.col(0) *= -1;
    Mat L = lorentz_embedding(a);
    EXPECT_LT((L * Q3 * L.transpose() - Q3).norm(), 1e-9 * std::max(1.0, L.squaredNorm()));
    EXPECT_NEAR(L.determinant(), 1.0, 1e-9 * std::max(1.0, L.squaredNorm()));

    Eigen::Matrix2cd c;
    c << Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
    c /= std::sqrt(c.determinant());
    Mat M = lorentz_embedding(c);
    EXPECT_LT((M * Q4 * M.transpose() - Q4).norm(), 1e-9 * std::max(1.0, M.squaredNorm()));
    EXPECT_NEAR(M.determinant(), 1.0, 1e-9 * std::max(1.0, M.squaredNorm() * M.norm()));
  }
}

TEST(Word, ReduceInverseConcat) {
  EXPECT_EQ(word::reduce("abBA"), "");
  EXPECT_EQ(word::reduce("aAb"), "b");
  EXPECT_EQ(word::inverse("abAB"), "baBA");
  EXPECT_EQ(word::power("ab", -2), "BABA");
  EXPECT_EQ(word::power("ab", 0), "");
}
