#include <gtest/gtest.h>

#include <cmath>

#include "impzone/mpc.hpp"
#include "impzone/sim.hpp"
#include "support.hpp"

using namespace impzone;
using namespace impzone::testing;

namespace {

MpcConfig tracking() { return make_mpc_config(example_config(), example_sets(), MpcVariant::ArtificialVariables); }
MpcConfig setbased() { return make_mpc_config(example_config(), example_sets(), MpcVariant::SetBased); }

}  // namespace

TEST(MpcConfig, Validation) {
  MpcConfig c = tracking();
  EXPECT_NO_THROW(c.validate());
  c.horizon = 0;
  EXPECT_THROW(c.validate(), Error);
  c = tracking();
  c.Q = -Matrix::Identity(2, 2);
  EXPECT_THROW(c.validate(), Error);
  c = setbased();
  c.invariant = Polytope::empty(2);
  EXPECT_THROW(c.validate(), Error);
}

TEST(TrackingQp, LayoutAndDynamics) {
  const MpcConfig cfg = tracking();
  const QpProblem qp = build_tracking_qp(vec({3.0, 0.15}), cfg);
  const QpLayout& L = qp.layout;
  EXPECT_EQ(L.size, 5 * 1 + 5 * 2 + 2 + 1 + 2);
  EXPECT_EQ(qp.data.P.rows(), L.size);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(qp.data.P).eigenvalues().minCoeff(), -1e-10);
  // any input sequence, propagated through the plant, satisfies the dynamics rows
  Vector z = Vector::Zero(L.size);
  Vector x = vec({3.0, 0.15});
  for (int j = 0; j < 5; ++j) {
    const Vector u = vec({0.05 * j - 0.1});
    z.segment(L.u(j), 1) = u;
    x = cfg.plant.step(x, u);
    z.segment(L.x(j + 1), 2) = x;
  }
  const Vector r = qp.data.E * z - qp.data.f;
  // first 5*n rows are dynamics
  EXPECT_LT(r.head(10).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TrackingQp, ExampleFromLowerLeft) {
  const MpcConfig cfg = tracking();
  const ControlStep s = control_step(vec({0.55, 0.55}), cfg);
  EXPECT_LE(std::abs(s.u(0)), 0.2 + 1e-9);
  // terminal state on the equilibrium line and at x_s
  EXPECT_LT((s.predicted_states.back() - s.xs).norm(), 1e-6);
  EXPECT_LT((cfg.plant.Ad * s.xs + cfg.plant.Bd * s.us - s.xs).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((s.xs - cfg.G * s.us).norm(), 1e-6);
  EXPECT_TRUE(contains(cfg.target_admissible, s.xstar, 1e-7));
}

TEST(TrackingQp, StationaryAtAdmissibleEquilibrium) {
  const MpcConfig cfg = tracking();
  const Vector us = vec({0.19});
  const Vector xs = cfg.G * us;
  ASSERT_TRUE(contains(cfg.target_admissible, xs, 0.0));
  const ControlStep s = control_step(xs, cfg);
  EXPECT_NEAR(s.cost, 0.0, 1e-6);
  EXPECT_NEAR(s.u(0), 0.19, 1e-4);
  EXPECT_LT((s.xstar - s.xs).norm(), 1e-3);
}

TEST(TrackingQp, SingleStepReducesToReachableEquilibrium) {
  MpcConfig cfg = tracking();
  cfg.horizon = 1;
  cfg.R = Matrix::Zero(1, 1);
  cfg.state_admissible = Polytope::box(vec({-100, -100}), vec({100, 100}));
  cfg.target_admissible = cfg.state_admissible;
  // x = 0 is itself the u = 0 equilibrium, reachable with u = 0
  const ControlStep s = control_step(vec({0.0, 0.0}), cfg);
  EXPECT_NEAR(s.cost, 0.0, 1e-7);
  EXPECT_LT((s.predicted_states[1] - s.xs).norm(), 1e-6);
}

TEST(TrackingQp, InfeasibleFarAway) {
  const MpcConfig cfg = tracking();
  try {
    control_step(vec({40.0, 40.0}), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleProblem);
  }
}

TEST(TrackingQp, CostMatchesObjective) {
  const MpcConfig cfg = tracking();
  const QpProblem qp = build_tracking_qp(vec({4.45, 1.75}), cfg);
  const QpResult r = default_qp_solver().solve(qp.data);
  ASSERT_TRUE(r.optimal());
  const QpLayout& L = qp.layout;
  const Vector xs = r.x.segment(L.xs, 2), us = r.x.segment(L.us, 1), xstar = r.x.segment(L.xstar, 2);
  double J = (vec({4.45, 1.75}) - xs).dot(cfg.Q * (vec({4.45, 1.75}) - xs));
  for (int j = 0; j < 5; ++j) {
    if (j > 0) J += (r.x.segment(L.x(j), 2) - xs).dot(cfg.Q * (r.x.segment(L.x(j), 2) - xs));
    J += (r.x.segment(L.u(j), 1) - us).dot(cfg.R * (r.x.segment(L.u(j), 1) - us));
  }
  J += (xs - xstar).dot(cfg.Q_O * (xs - xstar));
  EXPECT_NEAR(qp.cost(r.x), J, 1e-8);
}

TEST(SetBasedQp, ZeroCostInsideInvariantSet) {
  const MpcConfig cfg = setbased();
  const Vector x = chebyshev_center(cfg.invariant).center;
  const ControlStep s = control_step(x, cfg);
  EXPECT_NEAR(s.cost, 0.0, 1e-7);
  EXPECT_LT((s.xstar_seq.front() - x).norm(), 1e-4);
  EXPECT_TRUE(contains(cfg.invariant, s.predicted_states[1], 1e-6));
}

TEST(SetBasedQp, PositiveCostOutside) {
  const MpcConfig cfg = setbased();
  const ControlStep s = control_step(vec({4.45, 1.75}), cfg);
  EXPECT_GT(s.cost, 1e-4);
  EXPECT_LT((s.predicted_states.back() - s.xstar_seq.back()).norm(), 1e-6);
  EXPECT_TRUE(contains(cfg.invariant, s.xstar_seq.back(), 1e-7));
}

TEST(SetBasedQp, SingletonReducesToFixedTarget) {
  MpcConfig cfg = setbased();
  const Vector xs = cfg.G * vec({0.2});
  cfg.invariant = Polytope::point(xs);
  const ControlStep s = control_step(xs, cfg);
  EXPECT_NEAR(s.cost, 0.0, 1e-7);
  EXPECT_NEAR(s.u(0), 0.2, 1e-5);
}

TEST(ClosedLoop, RecursiveFeasibilityFromUpperRight) {
  const SetsResult& sets = example_sets();
  for (const MpcVariant v : {MpcVariant::ArtificialVariables, MpcVariant::SetBased}) {
    MpcController ctl(make_mpc_config(example_config(), sets, v));
    EXPECT_NO_THROW(run_closed_loop(sets.system, sets.modal, ctl, vec({4.45, 1.75}), 30, 11));
  }
}

TEST(ClosedLoop, TrackingCostDecreases) {
  const SetsResult& sets = example_sets();
  for (const Vector& x0 : {vec({3.0, 0.15}), vec({4.45, 1.75}), vec({0.55, 0.55})}) {
    MpcController ctl(tracking());
    const Trajectory tr = run_closed_loop(sets.system, sets.modal, ctl, x0, 30, 11);
    for (std::size_t k = 1; k < tr.costs.size(); ++k) EXPECT_LE(tr.costs[k], tr.costs[k - 1] + 1e-6) << k;
  }
}
