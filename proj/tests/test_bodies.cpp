#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gaugeopt/bodies.hpp"
#include "gaugeopt/errors.hpp"
#include "support/oracles.hpp"

using namespace gaugeopt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(LpBall, SandwichConstants) {
  const ConvexBody l1 = make_lp_ball(4, 1.0);
  EXPECT_DOUBLE_EQ(l1.inner_radius(), 0.5);
  EXPECT_DOUBLE_EQ(l1.outer_radius(), 1.0);
  EXPECT_DOUBLE_EQ(l1.kappa(), 2.0);
  for (int d : {1, 3, 17}) {
    const ConvexBody l2 = make_l2_ball(d);
    EXPECT_DOUBLE_EQ(l2.inner_radius(), 1.0);
    EXPECT_DOUBLE_EQ(l2.outer_radius(), 1.0);
  }
  const ConvexBody cube = make_lp_ball(9, kInf);
  EXPECT_DOUBLE_EQ(cube.inner_radius(), 1.0);
  EXPECT_DOUBLE_EQ(cube.outer_radius(), 3.0);
  EXPECT_TRUE(cube.exact());
}

TEST(LpBall, CubeBoundary) {
  const ConvexBody cube = make_lp_ball(9, kInf);
  EXPECT_TRUE(cube.membership(Vec::Ones(9), 0.1));
  EXPECT_FALSE(cube.membership(1.001 * Vec::Ones(9), 0.1));
}

TEST(LpBall, RejectsPBelowOne) {
  EXPECT_THROW(make_lp_ball(3, 0.5), PreconditionError);
  EXPECT_THROW(make_lp_ball(0, 2.0), PreconditionError);
}

TEST(LpBall, MembershipMatchesNorm) {
  std::mt19937_64 rng(1);
  for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
    const ConvexBody body = make_lp_ball(5, p);
    for (int i = 0; i < 200; ++i) {
      const Vec x = 0.8 * oracle::gaussian(rng, 5);
      const double n = oracle::lp_norm(x, p);
      if (std::abs(n - 1.0) < 1e-9) continue;
      EXPECT_EQ(body.membership(x, 0.01), n <= 1.0) << "p=" << p;
      EXPECT_NEAR(body.analytic_gauge(x), n, 1e-12 * n);
    }
  }
}

TEST(Simplex, TwoDimensionalIsAnInterval) {
  const BodyWithMap s = make_simplex_body(2);
  EXPECT_EQ(s.body.dim(), 1);
  EXPECT_DOUBLE_EQ(s.body.inner_radius(), 0.25);
  EXPECT_DOUBLE_EQ(s.body.outer_radius(), 1.0);
  EXPECT_TRUE(s.body.membership(Vec::Constant(1, -0.25), 0.01));
  EXPECT_TRUE(s.body.membership(Vec::Constant(1, 0.75), 0.01));
  EXPECT_FALSE(s.body.membership(Vec::Constant(1, -0.2501), 0.01));
  EXPECT_FALSE(s.body.membership(Vec::Constant(1, 0.7501), 0.01));
}

TEST(Simplex, CenterIsInsideTheSimplex) {
  const BodyWithMap s = make_simplex_body(3);
  const Vec c = s.map.forward(Vec::Zero(2));
  EXPECT_NEAR(c(0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(c(1), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(c(2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.sum(), 1.0, 1e-15);
  EXPECT_TRUE(s.body.membership(Vec::Zero(2), 0.01));
}

TEST(Simplex, VertexMembership) {
  for (int d : {3, 5, 8}) {
    const BodyWithMap s = make_simplex_body(d);
    const Vec v = Vec::Constant(d - 1, -1.0 / (2.0 * d));
    EXPECT_TRUE(s.body.membership(v, 0.01));
    EXPECT_FALSE(s.body.membership(1.01 * v, 0.01));
    // The image of the vertex is e_d.
    const Vec e = s.map.forward(v);
    EXPECT_NEAR(e(d - 1), 1.0, 1e-14);
    EXPECT_NEAR(e.head(d - 1).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  }
  EXPECT_THROW(make_simplex_body(1), PreconditionError);
}

TEST(Simplex, ForwardLandsInSimplexForMembers) {
  std::mt19937_64 rng(2);
  const int d = 6;
  const BodyWithMap s = make_simplex_body(d);
  for (int i = 0; i < 500; ++i) {
    const Vec x = 0.5 * oracle::gaussian(rng, d - 1);
    const Vec y = s.map.forward(x);
    EXPECT_NEAR(y.sum(), 1.0, 1e-12);
    if (s.body.membership(x, 0.01)) EXPECT_GE(y.minCoeff(), -1e-12);
    else EXPECT_LT(y.minCoeff(), 1e-12);
    EXPECT_NEAR(s.body.analytic_gauge(x), oracle::simplex_gauge(x), 1e-12);
  }
}

TEST(TraceBall, IdentityExamples) {
  const ConvexBody tb = make_trace_norm_ball(2, 2);
  EXPECT_FALSE(tb.membership(oracle::flatten(Eigen::MatrixXd::Identity(2, 2)), 0.01));
  EXPECT_TRUE(tb.membership(oracle::flatten(0.5 * Eigen::MatrixXd::Identity(2, 2)), 0.01));
  EXPECT_DOUBLE_EQ(tb.inner_radius(), 1.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(tb.outer_radius(), 1.0);
}

TEST(TraceBall, GaugeMatchesNuclearNorm) {
  std::mt19937_64 rng(3);
  const ConvexBody tb = make_trace_norm_ball(3, 4);
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXd M = oracle::gaussian(rng, 3, 4);
    const double nuc = oracle::singular_values(M).sum();
    const Vec x = oracle::flatten(M);
    EXPECT_NEAR(tb.analytic_gauge(x), nuc, 1e-10 * nuc);
    EXPECT_TRUE(tb.membership(x / nuc * (1.0 - 1e-9), 0.01));
    EXPECT_FALSE(tb.membership(x / nuc * (1.0 + 1e-9), 0.01));
  }
}

TEST(OpBall, RankOneIsOnTheBoundary) {
  std::mt19937_64 rng(4);
  const ConvexBody ob = make_op_norm_ball(4, 3);
  EXPECT_DOUBLE_EQ(ob.inner_radius(), 1.0);
  EXPECT_DOUBLE_EQ(ob.outer_radius(), std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(ob.kappa(), std::sqrt(3.0));
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXd M = oracle::unit(rng, 4) * oracle::unit(rng, 3).transpose();
    EXPECT_NEAR(oracle::singular_values(M)(0), 1.0, 1e-12);
    EXPECT_TRUE(ob.membership(oracle::flatten(M), 1e-3));
    EXPECT_FALSE(ob.membership(oracle::flatten(1.01 * M), 1e-3));
  }
}

TEST(Birkhoff, CenterAndSmallCases) {
  for (int n : {2, 3, 4}) {
    const BodyWithMap b = make_birkhoff_body(n);
    EXPECT_EQ(b.body.dim(), (n - 1) * (n - 1));
    EXPECT_TRUE(b.body.membership(Vec::Zero(b.body.dim()), 0.01));
    EXPECT_LE(b.body.kappa(), std::sqrt(5.0) * n);
    const Vec c = b.map.forward(Vec::Zero(b.body.dim()));
    EXPECT_TRUE(c.isApprox(Vec::Constant(n * n, 1.0 / n)));
  }
  // n = 2: the two permutation matrices are the endpoints of a segment.
  const BodyWithMap b2 = make_birkhoff_body(2);
  ASSERT_EQ(b2.body.dim(), 1);
  const Vec hi = Vec::Constant(1, 0.5 / b2.body.analytic_gauge(Vec::Constant(1, 0.5)));
  const Vec lo = Vec::Constant(1, -0.5 / b2.body.analytic_gauge(Vec::Constant(1, -0.5)));
  for (const Vec& v : {hi, lo}) {
    EXPECT_LE(v.norm(), b2.body.outer_radius() + 1e-12);
    const Eigen::MatrixXd P = oracle::unflatten(b2.map.forward(v), 2, 2);
    EXPECT_NEAR(P.cwiseAbs().minCoeff(), 0.0, 1e-12);
    EXPECT_NEAR(P.cwiseAbs().maxCoeff(), 1.0, 1e-12);
  }
}

TEST(Birkhoff, ForwardIsDoublyStochasticForMembers) {
  std::mt19937_64 rng(5);
  const int n = 4;
  const BodyWithMap b = make_birkhoff_body(n);
  for (int i = 0; i < 300; ++i) {
    const Vec x = 0.3 * oracle::gaussian(rng, b.body.dim());
    const Eigen::MatrixXd X = oracle::unflatten(b.map.forward(x), n, n);
    EXPECT_LE((X.rowwise().sum() - Vec::Ones(n)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((X.colwise().sum().transpose() - Vec::Ones(n)).cwiseAbs().maxCoeff(), 1e-12);
    if (std::abs(X.minCoeff()) < 1e-12) continue;
    EXPECT_EQ(b.body.membership(x, 0.01), X.minCoeff() >= 0.0);
  }
}

TEST(Birkhoff, PermutationsAreVerticesWithinOuterRadius) {
  const int n = 4;
  const BodyWithMap b = make_birkhoff_body(n);
  const Eigen::MatrixXd Q = helmert_basis(n);
  std::vector<int> perm{0, 1, 2, 3};
  do {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) P(i, perm[i]) = 1.0;
    const Vec x = oracle::flatten(Q.transpose() * P * Q);
    EXPECT_NEAR(x.norm(), b.body.outer_radius(), 1e-12);
    EXPECT_TRUE(b.body.membership(x, 0.01));
    EXPECT_FALSE(b.body.membership(1.001 * x, 0.01));
    EXPECT_NEAR(b.body.analytic_gauge(x), 1.0, 1e-12);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(HelmertBasis, Orthonormal) {
  for (int n : {2, 3, 7}) {
    const Eigen::MatrixXd Q = helmert_basis(n);
    EXPECT_LE((Q.transpose() * Q - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm(), 1e-14);
    EXPECT_LE((Q.transpose() * Vec::Ones(n)).norm(), 1e-14);
  }
}

TEST(RotationHull, BasicMembers) {
  for (int n : {3, 4}) {
    const ConvexBody rh = make_rotation_hull_body(n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd DI = I;
    DI.row(n - 1) *= -1.0;
    EXPECT_NEAR(signed_procrustes(DI), n - 2.0, 1e-12);
    EXPECT_TRUE(rh.membership(oracle::flatten(I), 0.01));
    EXPECT_TRUE(rh.membership(Vec::Zero(n * n), 0.01));
    EXPECT_FALSE(rh.membership(oracle::flatten(2.0 * I), 0.01));
    // A reflection has operator norm 1 but is not in conv SO(n).
    EXPECT_FALSE(rh.membership(oracle::flatten(DI), 0.01));
  }
  EXPECT_THROW(make_rotation_hull_body(2), PreconditionError);
}

TEST(RotationHull, RandomRotationsAreMembers) {
  std::mt19937_64 rng(6);
  const int n = 4;
  const ConvexBody rh = make_rotation_hull_body(n);
  for (int i = 0; i < 50; ++i) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::gaussian(rng, n, n));
    Eigen::MatrixXd O = qr.householderQ();
    if (O.determinant() < 0) O.col(0) *= -1.0;
    EXPECT_TRUE(rh.membership(oracle::flatten(O), 0.01));
    EXPECT_NEAR(rh.analytic_gauge(oracle::flatten(O)), 1.0, 1e-10);
    Eigen::MatrixXd R = O;
    R.col(0) *= -1.0;
    EXPECT_FALSE(rh.membership(oracle::flatten(R), 0.01));
  }
}

TEST(SignedProcrustes, MatchesBruteForceInTwoDimensions) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXd A = oracle::gaussian(rng, 2, 2);
    double best = -1e300;
    for (int k = 0; k < 20000; ++k) {
      const double th = 2.0 * M_PI * k / 20000;
      Eigen::Matrix2d O;
      O << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      best = std::max(best, (O.array() * A.array()).sum());
    }
    EXPECT_NEAR(signed_procrustes(A), best, 1e-6 * A.norm());
  }
}

TEST(PsdUnitTrace, CenterAndTrace) {
  std::mt19937_64 rng(8);
  for (int n : {2, 3, 5}) {
    const BodyWithMap p = make_psd_unit_trace_body(n);
    EXPECT_EQ(p.body.dim(), (n - 1) + n * (n - 1) / 2);
    EXPECT_DOUBLE_EQ(p.body.inner_radius(), std::pow(n, -1.5) / 4.0);
    EXPECT_DOUBLE_EQ(p.body.outer_radius(), 2.0 * std::sqrt(static_cast<double>(n)));
    EXPECT_TRUE(p.body.membership(Vec::Zero(p.body.dim()), 0.01));
    const Eigen::MatrixXd C = oracle::unflatten(p.map.forward(Vec::Zero(p.body.dim())), n, n);
    EXPECT_GE(oracle::jacobi_eigenvalues(C)(0), 1.0 / (2.0 * n) - 1e-15);
    for (int i = 0; i < 50; ++i) {
      const Eigen::MatrixXd M = oracle::unflatten(p.map.forward(oracle::gaussian(rng, p.body.dim())), n, n);
      EXPECT_NEAR(M.trace(), 1.0, 1e-12);
      EXPECT_LE((M - M.transpose()).norm(), 0.0);
    }
  }
}

TEST(PsdUnitTrace, MembershipAgreesWithEigenvalues) {
  std::mt19937_64 rng(9);
  const int n = 4;
  const BodyWithMap p = make_psd_unit_trace_body(n);
  const double delta = 1e-3;
  for (int i = 0; i < 200; ++i) {
    const Vec x = 0.3 * oracle::gaussian(rng, p.body.dim());
    const double lmin = oracle::jacobi_eigenvalues(oracle::unflatten(p.map.forward(x), n, n))(0);
    if (std::abs(lmin) < 1e-3) continue;
    EXPECT_EQ(p.body.membership(x, delta), lmin > 0.0) << lmin;
  }
}

TEST(PsdBoundedDiag, BoundaryAndBounds) {
  const int n = 3;
  const BodyWithMap p = make_psd_bounded_diag_body(n);
  EXPECT_EQ(p.body.dim(), n + n * (n - 1) / 2);
  EXPECT_DOUBLE_EQ(p.body.inner_radius(), 0.25);
  EXPECT_DOUBLE_EQ(p.body.outer_radius(), std::pow(3.0, 1.5));
  Vec x = Vec::Zero(p.body.dim());
  x.head(n).setConstant(0.5);
  EXPECT_TRUE(p.body.membership(x, 1e-3));
  x(0) = 0.51;
  EXPECT_FALSE(p.body.membership(x, 1e-3));
  x.setZero();
  x.head(n).setConstant(-0.5);  // the zero matrix
  EXPECT_TRUE(p.body.membership(x, 1e-3));
  x(0) = -0.6;
  EXPECT_FALSE(p.body.membership(x, 1e-3));
}

TEST(SymmetricFromUpper, ColumnMajorFill) {
  const Vec z = (Vec(3) << 1.0, 2.0, 3.0).finished();
  const Eigen::MatrixXd S = symmetric_from_upper(3, z);
  EXPECT_EQ(S(0, 1), 1.0);
  EXPECT_EQ(S(0, 2), 2.0);
  EXPECT_EQ(S(1, 2), 3.0);
  EXPECT_EQ(S(2, 1), 3.0);
  EXPECT_EQ(S.diagonal().norm(), 0.0);
}

struct MappedCase {
  const char* name;
  BodyWithMap (*make)(int);
  int n;
};

class ReparametrizationTest : public ::testing::TestWithParam<MappedCase> {};

TEST_P(ReparametrizationTest, PullbackIsAdjointOfForward) {
  const MappedCase c = GetParam();
  const BodyWithMap b = c.make(c.n);
  std::mt19937_64 rng(10);
  const Vec f0 = b.map.forward(Vec::Zero(b.body.dim()));
  EXPECT_TRUE(f0.isApprox(b.map.center));
  for (int i = 0; i < 100; ++i) {
    const Vec x = oracle::gaussian(rng, b.map.reduced_dim);
    const Vec zeta = oracle::gaussian(rng, b.map.ambient_dim);
    const double lhs = b.map.pullback_subgradient(zeta, x).dot(x);
    const double rhs = zeta.dot(b.map.forward(x) - f0);
    EXPECT_NEAR(lhs, rhs, 1e-11 * (1.0 + std::abs(rhs)));
    // Linearity of the pullback.
    const Vec zeta2 = oracle::gaussian(rng, b.map.ambient_dim);
    const Vec lin = b.map.pullback_subgradient(2.5 * zeta + zeta2, x);
    const Vec sep = 2.5 * b.map.pullback_subgradient(zeta, x) + b.map.pullback_subgradient(zeta2, x);
    EXPECT_LE((lin - sep).norm(), 1e-12 * (1.0 + sep.norm()));
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllMaps, ReparametrizationTest,
    ::testing::Values(MappedCase{"simplex", make_simplex_body, 5}, MappedCase{"birkhoff", make_birkhoff_body, 4},
                      MappedCase{"psd_trace", make_psd_unit_trace_body, 4},
                      MappedCase{"psd_diag", make_psd_bounded_diag_body, 3}),
    [](const auto& info) { return std::string(info.param.name); });

struct BodyCase {
  const char* name;
  ConvexBody body;
};

std::vector<BodyCase> all_bodies() {
  return {{"l2", make_l2_ball(4)},
          {"l1", make_lp_ball(4, 1.0)},
          {"linf", make_lp_ball(4, kInf)},
          {"l3", make_lp_ball(3, 3.0)},
          {"simplex", make_simplex_body(5).body},
          {"trace", make_trace_norm_ball(2, 3)},
          {"op", make_op_norm_ball(3, 2)},
          {"birkhoff", make_birkhoff_body(3).body},
          {"rotation", make_rotation_hull_body(3)},
          {"psd_trace", make_psd_unit_trace_body(3).body},
          {"psd_diag", make_psd_bounded_diag_body(3).body}};
}

TEST(ConvexBodySandwich, RaysCrossBetweenRadii) {
  std::mt19937_64 rng(11);
  const double delta = 1e-3;
  for (const BodyCase& c : all_bodies()) {
    for (int i = 0; i < 100; ++i) {
      const Vec u = oracle::unit(rng, c.body.dim());
      EXPECT_TRUE(c.body.membership(c.body.inner_radius() * (1.0 - 1e-6) * u, delta)) << c.name;
      EXPECT_FALSE(c.body.membership((c.body.outer_radius() * (1.0 + 1e-3) + delta) * u, delta)) << c.name;
    }
  }
}

TEST(ConvexBodyGauge, HomogeneousSubadditiveAndSandwiched) {
  std::mt19937_64 rng(12);
  for (const BodyCase& c : all_bodies()) {
    if (!c.body.has_analytic_gauge()) continue;
    for (int i = 0; i < 100; ++i) {
      const Vec x = oracle::gaussian(rng, c.body.dim());
      const Vec y = oracle::gaussian(rng, c.body.dim());
      const double gx = c.body.analytic_gauge(x);
      EXPECT_NEAR(c.body.analytic_gauge(3.0 * x), 3.0 * gx, 1e-10 * gx) << c.name;
      EXPECT_LE(c.body.analytic_gauge(x + y), gx + c.body.analytic_gauge(y) + 1e-10) << c.name;
      EXPECT_GE(gx, x.norm() / c.body.outer_radius() * (1.0 - 1e-12)) << c.name;
      EXPECT_LE(gx, x.norm() / c.body.inner_radius() * (1.0 + 1e-12)) << c.name;
    }
  }
}

TEST(ConvexBody, ValidatesInput) {
  const ConvexBody b = make_l2_ball(3);
  EXPECT_THROW(b.membership(Vec::Zero(2), 0.1), PreconditionError);
  EXPECT_THROW(b.membership(Vec::Zero(3), 0.0), PreconditionError);
  Vec bad = Vec::Zero(3);
  bad(1) = std::nan("");
  EXPECT_THROW(b.membership(bad, 0.1), PreconditionError);
  EXPECT_TRUE(b.membership(Vec::Zero(3), 0.1));
  auto never = [](const Vec&, double) { return false; };
  EXPECT_THROW(ConvexBody("x", 2, 2.0, 1.0, never), PreconditionError);
}

TEST(OracleCallCounter, CountsAndIsTransparent) {
  const ConvexBody raw = make_lp_ball(3, 1.0);
  const ConvexBody counted = oracle_call_counter(raw);
  EXPECT_EQ(counted.oracle_calls(), 0u);
  counted.membership(Vec::Ones(3), 0.1);
  counted.membership(Vec::Zero(3), 0.1);
  EXPECT_EQ(counted.oracle_calls(), 2u);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Vec p = 0.5 * oracle::gaussian(rng, 3);
    EXPECT_EQ(counted.membership(p, 0.1), raw.membership(p, 0.1));
  }
  EXPECT_EQ(counted.oracle_calls(), 1002u);
  EXPECT_EQ(raw.oracle_calls(), 0u);
  // Copies share the count; widening keeps the counter.
  const ConvexBody copy = counted;
  copy.membership(Vec::Ones(3), 0.1);
  const ConvexBody wide = with_outer_radius(counted, 2.0);
  wide.membership(Vec::Ones(3), 0.1);
  EXPECT_EQ(counted.oracle_calls(), 1004u);
  EXPECT_DOUBLE_EQ(wide.outer_radius(), 2.0);
  EXPECT_THROW(with_outer_radius(raw, 0.5), PreconditionError);
}

}  // namespace
