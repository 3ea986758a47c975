#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "impzone/admissible.hpp"
#include "impzone/invariance.hpp"
#include "impzone/lti.hpp"
#include "impzone/polytope.hpp"

namespace impzone::testing {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Matrix example_A() { return (Matrix(2, 2) << -1.0, 1.2, 0.0, 0.2).finished(); }
inline Matrix example_B() { return (Matrix(2, 1) << 3.0, -2.0).finished(); }
inline Polytope example_X() { return Polytope::box(vec({0.5, 0.0}), vec({4.5, 4.0})); }
inline Polytope example_U() { return Polytope::box(vec({-0.2}), vec({0.2})); }
inline Polytope example_target() { return Polytope::box(vec({2.5, 1.5}), vec({4.0, 3.5})); }
inline ImpulsiveSystem example_system() {
  return ImpulsiveSystem(example_A(), example_B(), 1.0, example_X(), example_U());
}

/// Matrix exponential by scaling and squaring with a long Taylor series.
inline Matrix expm_oracle(const Matrix& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.1) ++s;
  const Matrix X = A / std::ldexp(1.0, s);
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * X / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Smallest q <= qmax with |x - p/q| < tol, searched exhaustively.
inline bool brute_rational(double x, double tol, long qmax, long& p, long& q) {
  for (q = 1; q <= qmax; ++q) {
    p = std::lround(x * static_cast<double>(q));
    if (std::abs(x - static_cast<double>(p) / static_cast<double>(q)) < tol) return true;
  }
  return false;
}

inline Vector poly_mul(const Vector& a, const Vector& b) {
  Vector c = Vector::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) c(i + j) += a(i) * b(j);
  return c;
}

inline Vector poly_add(Vector a, const Vector& b) {
  if (b.size() > a.size()) a.conservativeResizeLike(Vector::Zero(b.size()));
  a.head(b.size()) += b;
  return a;
}

/// Coefficients of u(w)' Y u(w) with u(w) = (1, w, ..., w^k).
inline Vector quadratic_form_poly(const Matrix& Y) {
  Vector c = Vector::Zero(2 * Y.rows() - 1);
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
    for (Eigen::Index j = 0; j < Y.cols(); ++j) c(i + j) += Y(i, j);
  return c;
}

inline Matrix random_psd(std::mt19937& gen, Eigen::Index k) {
  std::normal_distribution<double> g;
  Matrix R(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) R(i, j) = g(gen);
  return R * R.transpose();
}

inline Vector uniform_in_box(std::mt19937& gen, const Vector& lo, const Vector& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * u(gen);
  return x;
}

/// Random point of a bounded polytope by rejection from its bounding box.
inline Vector sample_in(std::mt19937& gen, const Polytope& P) {
  const Eigen::Index n = P.dim();
  Vector lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    hi(i) = support(P, e);
    lo(i) = -support(P, -e);
  }
  for (int tries = 0; tries < 100000; ++tries) {
    const Vector x = uniform_in_box(gen, lo, hi);
    if (contains(P, x, 0.0)) return x;
  }
  return chebyshev_center(P).center;
}

/// Does some u in U send x into P in one step? Plain LP feasibility.
inline bool one_step_reachable(const Polytope& P, const DiscreteSystem& d, const Polytope& U, const Vector& x,
                               Vector* u_out = nullptr) {
  const Eigen::Index m = U.dim();
  LpProblem lp = LpProblem::over(m);
  lp.G.resize(P.num_facets() + U.num_facets(), m);
  lp.h.resize(P.num_facets() + U.num_facets());
  lp.G << P.H() * d.Bd, U.H();
  lp.h << P.v() - P.H() * d.Ad * x, U.v();
  const LpResult r = default_lp_solver().solve(lp);
  if (r.optimal() && u_out) *u_out = r.x;
  return r.optimal();
}

}  // namespace impzone::testing

#include "impzone/config.hpp"

namespace impzone::testing {

inline ProblemConfig example_config() {
  ProblemConfig c;
  c.A = example_A();
  c.B = example_B();
  c.period = 1.0;
  c.state_set = SetSpec::box(vec({0.5, 0.0}), vec({4.5, 4.0}));
  c.input_set = SetSpec::box(vec({-0.2}), vec({0.2}));
  c.target = SetSpec::box(vec({2.5, 1.5}), vec({4.0, 3.5}));
  c.horizon = 5;
  c.Q = Matrix::Identity(2, 2);
  c.R = 10.0 * Matrix::Identity(1, 1);
  c.Q_O = 10.0 * Matrix::Identity(2, 2);
  c.x0 = vec({3.0, 0.15});
  return c;
}

inline const SetsResult& example_sets() {
  static const SetsResult s = compute_sets(example_config());
  return s;
}

}  // namespace impzone::testing
