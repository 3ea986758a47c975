#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace impzone;
using namespace impzone::testing;

namespace {

const ModalDecomposition& example_md() {
  static const ModalDecomposition md(example_A());
  return md;
}

const SpectrahedronSet& state_set() {
  static const SpectrahedronSet S(example_md(), example_X(), 1.0);
  return S;
}

const SpectrahedronSet& target_set() {
  static const SpectrahedronSet S(example_md(), example_target(), 1.0);
  return S;
}

}  // namespace

TEST(Lift, ExampleConstants) {
  const PolynomialLift L = build_lift(example_md(), example_X(), 1.0);
  EXPECT_EQ(L.etas, (std::vector<long>{-5, 1}));
  EXPECT_EQ(L.rho, 5);
  EXPECT_EQ(L.shift, 1);
  EXPECT_EQ(L.degree, 6);
  EXPECT_NEAR(L.a, 0.8187307530779818, 1e-12);
  EXPECT_EQ(L.b, 1.0);
  EXPECT_EQ(L.exponent(0), 6);
  EXPECT_EQ(L.exponent(1), 0);
}

TEST(Lift, ConstantTermAtShift) {
  const PolynomialLift L = build_lift(example_md(), example_X(), 1.0);
  for (Eigen::Index i = 0; i < L.num_facets(); ++i) {
    for (Eigen::Index d = 0; d <= L.degree; ++d) {
      EXPECT_EQ(L.c[i](d), d == L.shift ? example_X().v()(i) : 0.0);
    }
  }
}

TEST(Lift, ScalarNoShift) {
  const Matrix A = (Matrix(1, 1) << -1.0).finished();
  const ModalDecomposition md(A);
  const Polytope Y((Matrix(1, 1) << 1.0).finished(), vec({1.0}));
  const PolynomialLift L = build_lift(md, Y, 1.0);
  EXPECT_EQ(L.shift, 0);
  EXPECT_EQ(L.degree, 1);
  // P(w) = v - x w
  const Vector c = L.coefficients(0, vec({0.4}));
  EXPECT_NEAR(c(0), 1.0, 1e-15);
  EXPECT_NEAR(c(1), -0.4, 1e-15);
}

TEST(Lift, VacuousFacet) {
  const Polytope Y((Matrix(2, 2) << 1, 0, 0, 0).finished(), vec({1.0, 2.0}));
  const PolynomialLift L = build_lift(example_md(), Y, 1.0);
  // zero rows are dropped on construction, so only the real facet remains
  EXPECT_EQ(L.num_facets(), 1);
  const Polytope Z(Matrix::Zero(1, 2), vec({2.0}));
  EXPECT_EQ(build_lift(example_md(), Z, 1.0).num_facets(), 0);
}

TEST(Lift, ReconstructsFacetFunction) {
  const PolynomialLift L = build_lift(example_md(), example_X(), 1.0);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> c(-5, 5), t(0, 1);
  for (int k = 0; k < 50; ++k) {
    const Vector x = vec({c(gen), c(gen)});
    const double tk = t(gen);
    const double w = std::exp(-tk / 5.0);
    for (Eigen::Index i = 0; i < L.num_facets(); ++i) {
      const double lhs = L.evaluate(i, x, w) * std::exp(tk / 5.0);
      const double rhs = example_X().v()(i) - example_X().H().row(i).dot(free_response(example_md(), x, tk));
      EXPECT_NEAR(lhs, rhs, 1e-7);
    }
  }
}

TEST(MarkovLukasz, SmallExamples) {
  const MarkovLukasz ml = ml_adjoints(2, 0.0, 1.0);
  const Vector p1 = ml.lambda1(Matrix::Identity(2, 2));
  EXPECT_LT((p1 - vec({1, 0, 1})).norm(), 1e-15);
  const Vector p2 = ml.lambda2((Matrix(1, 1) << 1.0).finished());
  EXPECT_LT((p2 - vec({0, 1, -1})).norm(), 1e-15);
}

TEST(MarkovLukasz, MatchesPolynomialExpansion) {
  const double a = 0.8187307530779818, b = 1.0;
  const MarkovLukasz ml = ml_adjoints(6, a, b);
  ASSERT_EQ(ml.half(), 3);
  std::mt19937 gen(21);
  const Vector weight = vec({-a * b, a + b, -1.0});  // (w - a)(b - w)
  for (int k = 0; k < 20; ++k) {
    const Matrix Y1 = random_psd(gen, 4);
    const Matrix Y2 = random_psd(gen, 3);
    const Vector oracle = poly_add(quadratic_form_poly(Y1), poly_mul(weight, quadratic_form_poly(Y2)));
    const Vector got = ml.apply(Y1, Y2);
    ASSERT_EQ(got.size(), oracle.size());
    EXPECT_LT((got - oracle).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + oracle.cwiseAbs().maxCoeff()));
  }
}

TEST(MarkovLukasz, OddDegreePadded) {
  const MarkovLukasz ml = ml_adjoints(3, 0.0, 1.0);
  EXPECT_EQ(ml.degree(), 4);
}

TEST(Membership, Examples) {
  EXPECT_TRUE(is_admissible(state_set(), vec({3.0, 0.15})).admissible);
  EXPECT_FALSE(is_admissible(state_set(), vec({4.4, 3.9})).admissible);
  EXPECT_FALSE(grid_oracle(example_md(), example_X(), vec({4.4, 3.9}), 1.0, 2001));
  const AdmissibilityResult outside = is_admissible(state_set(), vec({10.0, 10.0}));
  EXPECT_FALSE(outside.admissible);
  EXPECT_FALSE(outside.in_ambient);
}

TEST(Membership, OriginInInterior) {
  const SpectrahedronSet S(example_md(), Polytope::box(vec({-1, -1}), vec({1, 1})), 1.0);
  EXPECT_TRUE(is_admissible(S, vec({0, 0})).admissible);
  EXPECT_TRUE(grid_oracle(example_md(), S.ambient(), vec({0, 0}), 1.0, 11));
}

TEST(Membership, TargetPointAgreesWithGrid) {
  const Vector x = vec({2.6, 3.4});
  const AdmissibilityResult r = is_admissible(target_set(), x);
  const bool grid = grid_oracle(example_md(), example_target(), x, 1.0, 1001);
  if (std::abs(r.margin) > 1e-4) EXPECT_EQ(r.admissible, grid);
}

TEST(GridOracle, Examples) {
  EXPECT_FALSE(grid_oracle(example_md(), example_X(), vec({5.0, 1.0}), 1.0, 2));
  EXPECT_TRUE(grid_oracle(example_md(), example_X(), vec({3.0, 0.15}), 1.0, 2001));
}

TEST(Membership, CertificatesReconstructPolynomial) {
  std::mt19937 gen(8);
  const SpectrahedronSet& S = state_set();
  int accepted = 0;
  for (int k = 0; k < 30; ++k) {
    const Vector x = uniform_in_box(gen, vec({0.5, 0.0}), vec({4.5, 4.0}));
    const AdmissibilityResult r = is_admissible(S, x);
    if (!r.admissible) continue;
    ++accepted;
    ASSERT_EQ(static_cast<Eigen::Index>(r.certificates.size()), S.ambient().num_facets());
    for (Eigen::Index i = 0; i < S.ambient().num_facets(); ++i) {
      const FacetCertificate& c = r.certificates[static_cast<std::size_t>(i)];
      const Vector p = S.padded_coefficients(i, x);
      const Vector q = S.ml().apply(c.Y1, c.Y2);
      EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(c.Y1).eigenvalues().minCoeff(), -1e-7);
      if (c.Y2.size()) EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(c.Y2).eigenvalues().minCoeff(), -1e-7);
      for (int g = 0; g < 1000; ++g) {
        const double w = S.lift().a + (1.0 - S.lift().a) * g / 999.0;
        EXPECT_GE(polyval(p, w), -1e-6);
      }
    }
  }
  EXPECT_GT(accepted, 5);
}

TEST(Membership, Convexity) {
  std::mt19937 gen(12);
  const SpectrahedronSet& S = state_set();
  std::vector<Vector> pts;
  while (pts.size() < 20) {
    const Vector x = uniform_in_box(gen, vec({0.5, 0.0}), vec({4.5, 4.0}));
    if (is_admissible(S, x).admissible) pts.push_back(x);
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    EXPECT_TRUE(is_admissible(S, 0.5 * (pts[i] + pts[i + 1])).admissible);
  }
}

TEST(SupportPoint, TargetBottom) {
  const Vector p = support_point(target_set(), vec({0, -1}));
  EXPECT_NEAR(p(1), 1.5, 1e-3);
  EXPECT_TRUE(grid_oracle(example_md(), example_target(), p, 1.0, 2001, 1e-6));
}

TEST(SupportPoint, ZeroDirectionGivesInteriorPoint) {
  const Vector p = support_point(target_set(), vec({0, 0}));
  EXPECT_TRUE(is_admissible(target_set(), p).admissible);
  EXPECT_FALSE(is_admissible(target_set(), p).marginal);
}

TEST(SupportPoint, ShortPeriodApproachesBox) {
  // stable diagonal flow over a tiny period barely moves the state
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = -2.0;
  const ModalDecomposition md(A);
  const Polytope Y = Polytope::box(vec({-1, -1}), vec({1, 1}));
  const SpectrahedronSet S(md, Y, 1e-3);
  const Vector p = support_point(S, vec({1, 0}));
  EXPECT_NEAR(p(0), 1.0, 1e-4);
}

TEST(SupportPoint, AgreesWithRayBisection) {
  const SpectrahedronSet& S = target_set();
  const Vector c = interior_point(S).x;
  for (const auto& dir : sample_directions(2, 8)) {
    const Vector p = support_point(S, dir);
    // bisection along the ray from c through p with the grid oracle
    const Vector d = p - c;
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      (grid_oracle(example_md(), example_target(), c + mid * d, 1.0, 4001) ? lo : hi) = mid;
    }
    EXPECT_NEAR(lo, 1.0, 1e-3 / std::max(1e-9, d.norm()) + 1e-3);
  }
}

TEST(InnerPolytope, TargetK16) {
  const Polytope P = inner_polytope(target_set(), 16);
  EXPECT_TRUE(is_subset(P, example_target(), 1e-9));
  const PointList vs = vertices(P);
  EXPECT_GE(vs.size(), 3u);
  for (const auto& v : vs) {
    EXPECT_TRUE(grid_oracle(example_md(), example_target(), v, 1.0, 2001));
    EXPECT_TRUE(is_admissible(target_set(), v).admissible);
  }
}

TEST(InnerPolytope, RecoversContractingInvariantSet) {
  // a componentwise contraction keeps this diamond, so the admissible set is the diamond itself
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = -2.0;
  const ModalDecomposition md(A);
  const Polytope Y = Polytope::hull({vec({1, 0}), vec({0, 1}), vec({-1, 0}), vec({0, -1})});
  const SpectrahedronSet S(md, Y, 1.0);
  const Polytope P = inner_polytope(S, 4);
  EXPECT_TRUE(is_subset(P, Y, 1e-9));
  double hausdorff = 0.0;
  for (const auto& e : vertices(Y)) {
    double best = 1e9;
    for (const auto& v : vertices(P)) best = std::min(best, (v - e).norm());
    hausdorff = std::max(hausdorff, best);
  }
  // support points are pulled inward by a relative 1e-6
  EXPECT_LT(hausdorff, 2e-6);
}

TEST(InnerPolytope, NestedDirectionsGiveNestedPolytopes) {
  const Polytope P = inner_polytope(target_set(), 4);
  const Polytope Q = inner_polytope(target_set(), 16);
  EXPECT_TRUE(is_subset(P, Q, 1e-6));
  EXPECT_FALSE(is_subset(Q, P, 1e-6));
}

TEST(InnerPolytope, PeriodMonotone) {
  const SpectrahedronSet longer(example_md(), example_target(), 1.0);
  const SpectrahedronSet shorter(example_md(), example_target(), 0.5);
  const Polytope a = inner_polytope(longer, 16);
  for (const auto& v : vertices(a)) EXPECT_TRUE(is_admissible(shorter, v).admissible);
}

TEST(InnerPolytope, DegenerateSet) {
  const SpectrahedronSet S(example_md(), Polytope::point(vec({0, 0})), 1.0);
  try {
    inner_polytope(S, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateHull);
  }
}
