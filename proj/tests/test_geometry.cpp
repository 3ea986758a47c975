#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace impzone;
using namespace impzone::testing;

namespace {

Polytope unit_box(Eigen::Index n) { return Polytope::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)); }

bool same_set(const Polytope& P, const Polytope& Q, double tol = 1e-7) {
  return is_subset(P, Q, tol) && is_subset(Q, P, tol);
}

DiscreteSystem example_discrete() { return discretize(example_system()); }

Polytope triangle() { return Polytope::hull({vec({0, 0}), vec({1, 0}), vec({0, 1})}); }

}  // namespace

TEST(Polytope, ConstructionNormalizesAndFlagsEmpty) {
  const Polytope P((Matrix(2, 1) << 2.0, -4.0).finished(), vec({2.0, 4.0}));
  EXPECT_NEAR(P.H().row(0).norm(), 1.0, 1e-15);
  EXPECT_TRUE(contains(P, vec({1.0})));
  EXPECT_TRUE(contains(P, vec({-1.0})));
  const Polytope bad((Matrix(1, 1) << 0.0).finished(), vec({-1.0}));
  EXPECT_TRUE(bad.is_empty());
}

TEST(Polytope, Contains) {
  EXPECT_TRUE(contains(unit_box(2), vec({0, 0})));
  EXPECT_FALSE(contains(example_X(), vec({5, 0})));
  EXPECT_TRUE(contains(example_X(), vec({4.5, 0})));
}

TEST(Polytope, Vertices) {
  const PointList vs = ordered_vertices_2d(example_target());
  ASSERT_EQ(vs.size(), 4u);
  const std::vector<Vector> expect = {vec({2.5, 1.5}), vec({4, 1.5}), vec({4, 3.5}), vec({2.5, 3.5})};
  for (const auto& e : expect) {
    bool found = false;
    for (const auto& v : vs) found = found || (v - e).norm() < 1e-12;
    EXPECT_TRUE(found) << e.transpose();
  }
  EXPECT_EQ(vertices(unit_box(3)).size(), 8u);
  try {
    vertices(unit_box(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedDimension);
  }
}

TEST(Polytope, HullReproducesFacets) {
  std::mt19937 gen(2);
  std::normal_distribution<double> g;
  PointList pts;
  for (int k = 0; k < 30; ++k) pts.push_back(vec({g(gen), g(gen)}));
  const Polytope P = Polytope::hull(pts);
  for (const auto& p : pts) EXPECT_TRUE(contains(P, p, 1e-9));
  for (const auto& v : vertices(P)) {
    EXPECT_LE(P.max_violation(v), 1e-8);
    bool is_input = false;
    for (const auto& p : pts) is_input = is_input || (p - v).norm() < 1e-8;
    EXPECT_TRUE(is_input);
  }
  const Polytope Q = Polytope::hull(vertices(P));
  EXPECT_TRUE(same_set(P, Q, 1e-6));
}

TEST(Intersect, Examples) {
  const Polytope shifted = Polytope::box(vec({1, 1}), vec({3, 3}));
  const Polytope far = Polytope::box(vec({1.5, 1.5}), vec({3, 3}));
  EXPECT_TRUE(intersect(unit_box(2), far).is_empty());
  EXPECT_FALSE(intersect(unit_box(2), shifted).is_empty());
  EXPECT_TRUE(same_set(intersect(unit_box(2), unit_box(2)), unit_box(2)));
  EXPECT_EQ(intersect(unit_box(2), unit_box(2)).num_facets(), 4);
  EXPECT_TRUE(same_set(intersect(example_X(), example_target()), example_target()));
  EXPECT_TRUE(is_subset(example_target(), example_X()));
}

TEST(AffinePreimage, Examples) {
  EXPECT_TRUE(same_set(affine_preimage(unit_box(2), Matrix::Identity(2, 2)), unit_box(2)));
  const Polytope half = affine_preimage(unit_box(2), 2.0 * Matrix::Identity(2, 2));
  EXPECT_TRUE(same_set(half, Polytope::box(vec({-0.5, -0.5}), vec({0.5, 0.5}))));
  try {
    affine_preimage(unit_box(2), (Matrix(2, 2) << 1, 1, 1, 1).finished());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularMap);
  }
}

TEST(AffinePreimage, HalfPeriodFlow) {
  const ModalDecomposition md(example_A());
  const Polytope P = affine_preimage(example_target(), md.transition(0.5));
  ASSERT_FALSE(P.is_empty());
  std::mt19937 gen(4);
  for (int k = 0; k < 20; ++k) {
    const Vector x = sample_in(gen, P);
    EXPECT_TRUE(contains(example_target(), free_response(md, x, 0.5), 1e-9));
  }
}

TEST(Project, Examples) {
  const Polytope a = project(Polytope::box(vec({0, 0}), vec({1, 1})), 1);
  EXPECT_TRUE(same_set(a, Polytope::box(vec({0}), vec({1}))));
  const Polytope b = project(triangle(), 1);
  EXPECT_TRUE(same_set(b, Polytope::box(vec({0}), vec({1}))));
}

TEST(Project, MatchesVertexProjection) {
  const DiscreteSystem d = example_discrete();
  const Polytope T = example_target();
  const Polytope U = example_U();
  // lifted {(x,u) : Ad x + Bd u in T, u in U}, bounded by adding the state box
  Matrix H(T.num_facets() + U.num_facets(), 3);
  Vector v(H.rows());
  H << T.H() * d.Ad, T.H() * d.Bd, Matrix::Zero(U.num_facets(), 2), U.H();
  v << T.v(), U.v();
  const Polytope lifted = intersect(Polytope(H, v), Polytope(
      (Matrix(4, 3) << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0).finished(), vec({10, 10, 10, 10})));
  PointList shadow;
  for (const auto& p : vertices(lifted)) shadow.push_back(p.head(2));
  const Polytope oracle = Polytope::hull(shadow);
  const Polytope fm = project(lifted, 2);
  EXPECT_TRUE(same_set(fm, oracle, 1e-7));
}

TEST(Project, RandomMembershipAgreesWithLp) {
  std::mt19937 gen(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    PointList pts;
    for (int k = 0; k < 12; ++k) pts.push_back(vec({g(gen), g(gen), g(gen)}));
    const Polytope lifted = Polytope::hull(pts);
    const Polytope shadow = project(lifted, 2);
    for (int k = 0; k < 100; ++k) {
      const Vector x = vec({1.5 * g(gen), 1.5 * g(gen)});
      // exists u with (x,u) in lifted?
      LpProblem lp = LpProblem::over(1);
      lp.G = lifted.H().col(2);
      lp.h = lifted.v() - lifted.H().leftCols(2) * x;
      const bool feasible = default_lp_solver().solve(lp).optimal();
      const double slack = shadow.max_violation(x);
      if (std::abs(slack) < 1e-7) continue;
      EXPECT_EQ(feasible, slack <= 0.0) << x.transpose();
    }
  }
}

TEST(PreSet, Examples) {
  const Polytope P = Polytope::box(vec({-1, 0}), vec({2, 1}));
  const DiscreteSystem stat{Matrix::Identity(2, 2), Matrix::Zero(2, 1)};
  EXPECT_TRUE(same_set(pre_set(P, stat, example_U()), P));

  const DiscreteSystem zero{Matrix::Zero(2, 2), Matrix::Zero(2, 1)};
  const Polytope all = pre_set(P, zero, example_U());
  EXPECT_EQ(all.num_facets(), 0);
  EXPECT_FALSE(all.is_empty());

  const DiscreteSystem d = example_discrete();
  const Polytope pre = pre_set(example_target(), d, example_U());
  const Vector x = vec({3.0, 1.6});
  EXPECT_TRUE(contains(pre, x, 1e-9));
  Vector u;
  ASSERT_TRUE(one_step_reachable(example_target(), d, example_U(), x, &u));
  EXPECT_LE(std::abs(u(0)), 0.2 + 1e-9);
}

TEST(MaxCis, StableScalar) {
  const DiscreteSystem d{(Matrix(1, 1) << 0.5).finished(), (Matrix(1, 1) << 1.0).finished()};
  const Polytope S0 = Polytope::box(vec({-10}), vec({10}));
  const MaxCisResult r = max_cis(S0, d, Polytope::box(vec({-1}), vec({1})), 10);
  EXPECT_TRUE(same_set(r.set, S0));
  for (const double x : {-10.0, 10.0}) {
    EXPECT_TRUE(one_step_reachable(S0, d, Polytope::box(vec({-1}), vec({1})), vec({x})));
  }
}

TEST(MaxCis, EquilibriumPoint) {
  const DiscreteSystem d{(Matrix(1, 1) << 0.5).finished(), (Matrix(1, 1) << 1.0).finished()};
  const MaxCisResult r = max_cis(Polytope::point(vec({1.0})), d, Polytope::box(vec({-1}), vec({1})), 10);
  EXPECT_TRUE(contains(r.set, vec({1.0}), 1e-9));
  EXPECT_FALSE(contains(r.set, vec({1.01}), 1e-9));
}

TEST(MaxCis, EmptiesOnDivergence) {
  const DiscreteSystem d{(Matrix(1, 1) << 2.0).finished(), (Matrix(1, 1) << 1.0).finished()};
  const MaxCisResult r = max_cis(Polytope::box(vec({1}), vec({2})), d, Polytope::point(vec({0})), 20);
  EXPECT_TRUE(r.set.is_empty() || !is_feasible(r.set));
}

TEST(MaxCis, ExampleTargetNoConvergenceKeepsOuterIterate) {
  const DiscreteSystem d = example_discrete();
  const Polytope S0 = example_target();
  try {
    max_cis(S0, d, example_U(), 50);
    FAIL() << "expected the recursion to still be moving after 50 steps";
  } catch (const NoConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 50);
    const Polytope& last = e.last_iterate();
    EXPECT_TRUE(is_subset(last, S0));
    // top facet decays toward the upper equilibrium height
    const double top = support(last, vec({0, 1}));
    EXPECT_NEAR(top, 0.4 / (std::exp(0.2) - 1.0), 1e-3);
    EXPECT_TRUE(contains(last, vec({3.3886, 1.8066}), 1e-3));
  }
}

TEST(MaxCis, MonotoneAndInvariantOnSmallProblem) {
  const DiscreteSystem d{(Matrix(2, 2) << 0.9, 0.3, -0.2, 0.8).finished(), (Matrix(2, 1) << 0.0, 1.0).finished()};
  const Polytope U = Polytope::box(vec({-0.3}), vec({0.3}));
  const Polytope S0 = unit_box(2);
  Polytope S = S0;
  for (int k = 0; k < 60; ++k) {
    const Polytope next = intersect(pre_set(S, d, U), S0);
    EXPECT_TRUE(is_subset(next, S, 1e-7));
    if (is_subset(S, next, 1e-7)) break;
    S = next;
  }
  const MaxCisResult r = max_cis(S0, d, U, 60);
  EXPECT_TRUE(is_subset(r.set, S0));
  for (const auto& v : vertices(r.set)) EXPECT_TRUE(one_step_reachable(r.set, d, U, v));
}

TEST(Chebyshev, Examples) {
  const ChebyshevBall a = chebyshev_center(unit_box(2));
  EXPECT_LT(a.center.norm(), 1e-9);
  EXPECT_NEAR(a.radius, 1.0, 1e-9);
  const ChebyshevBall b = chebyshev_center(triangle());
  EXPECT_NEAR(b.radius, (2.0 - std::sqrt(2.0)) / 2.0, 1e-9);
  const ChebyshevBall c = chebyshev_center(example_target());
  EXPECT_NEAR(c.radius, 0.75, 1e-9);
  EXPECT_NEAR(c.center(0), 3.25, 1e-9);
  try {
    chebyshev_center(Polytope::empty(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPolytope);
  }
}

TEST(Redundancy, DropsImpliedRows) {
  Matrix H(5, 2);
  H << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
  const Polytope P(H, vec({1, 1, 1, 1, 5}));
  EXPECT_EQ(remove_redundancy(P).num_facets(), 4);
}

TEST(Support, Values) {
  EXPECT_NEAR(support(example_target(), vec({1, 1})), 7.5, 1e-9);
  EXPECT_TRUE(std::isinf(support(Polytope::universe(2), vec({1, 0}))));
}

TEST(Hull, NearVerticalEdgeWithJitter) {
  // points on x = 4 that differ in x by ~1e-10 and alternate in y
  PointList pts = {vec({3.0, 1.5}), vec({2.5, 2.8})};
  for (int k = 0; k < 8; ++k) pts.push_back(vec({4.0 - 1e-10 * ((k * 37) % 11), k % 2 ? 2.8 : 1.5}));
  pts.push_back(vec({4.0 - 3e-10, 2.2}));
  const Polytope P = Polytope::hull(pts);
  for (const auto& p : pts) EXPECT_TRUE(contains(P, p, 1e-9));
  EXPECT_NEAR(support(P, vec({1, 0})), 4.0, 1e-9);
  EXPECT_NEAR(support(P, vec({1, 1})), 6.8, 1e-9);
  EXPECT_EQ(P.cached_vertices()->size(), 4u);
}
