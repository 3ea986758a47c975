#pragma once

#include <optional>

#include "impzone/error.hpp"
#include "impzone/lp.hpp"
#include "impzone/types.hpp"

namespace impzone {

struct DiscreteSystem;

/// H-representation {x : H x <= v}. Rows are kept normalized to unit length.
/// A polytope flagged empty carries no rows; an unflagged polytope with no rows
/// is all of R^n.
class Polytope {
 public:
  Polytope() = default;
  Polytope(Matrix H, Vector v);

  static Polytope box(const Vector& lower, const Vector& upper);
  static Polytope universe(Eigen::Index dim);
  static Polytope empty(Eigen::Index dim);
  static Polytope point(const Vector& p);
  /// Convex hull of points (dimension <= 3).
  static Polytope hull(const PointList& points, double tol = 1e-9);

  Eigen::Index dim() const { return H_.cols(); }
  Eigen::Index num_facets() const { return H_.rows(); }
  const Matrix& H() const { return H_; }
  const Vector& v() const { return v_; }
  bool is_empty() const { return empty_; }

  /// Cached vertex list, if one has been computed or supplied.
  const std::optional<PointList>& cached_vertices() const { return vertices_; }
  void set_vertices(PointList vertices) { vertices_ = std::move(vertices); }

  /// Slack v - Hx (negative entries are violations).
  Vector slack(const Vector& x) const { return v_ - H_ * x; }
  /// max_i (h_i x - v_i); zero rows give -inf.
  double max_violation(const Vector& x) const;

 private:
  Matrix H_{0, 0};
  Vector v_{0};
  bool empty_ = false;
  std::optional<PointList> vertices_;
};

struct ChebyshevBall {
  Vector center;
  double radius = 0.0;
};

struct MaxCisResult {
  Polytope set;
  int iterations = 0;
};

/// Raised by max_cis when the iteration cap is hit; keeps the last iterate.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& message, Polytope last, int iterations)
      : Error(ErrorCode::NoConvergence, message), last_(std::move(last)), iterations_(iterations) {}
  const Polytope& last_iterate() const { return last_; }
  int iterations() const { return iterations_; }

 private:
  Polytope last_;
  int iterations_;
};

bool contains(const Polytope& P, const Vector& x, double tol = 1e-9);

/// LP feasibility; also true for R^n.
bool is_feasible(const Polytope& P, const LpSolver& lp = default_lp_solver());

/// Drops rows implied by the others. Flags the result empty when infeasible.
Polytope remove_redundancy(const Polytope& P, double tol = 1e-9, const LpSolver& lp = default_lp_solver());

Polytope intersect(const Polytope& P, const Polytope& Q, const LpSolver& lp = default_lp_solver());

/// {x : M x in P}.
Polytope affine_preimage(const Polytope& P, const Matrix& M);

/// Projection onto the first `keep` coordinates by Fourier-Motzkin elimination.
Polytope project(const Polytope& P, Eigen::Index keep, const LpSolver& lp = default_lp_solver());

/// {x : exists u in U with Ad x + Bd u in P}.
Polytope pre_set(const Polytope& P, const DiscreteSystem& d, const Polytope& U,
                 const LpSolver& lp = default_lp_solver());

/// P subset of Q, checked facet by facet with slack `tol`.
bool is_subset(const Polytope& P, const Polytope& Q, double tol = 1e-7, const LpSolver& lp = default_lp_solver());

/// max_x c'x over P. Throws EmptyPolytope when infeasible; returns +inf when unbounded.
double support(const Polytope& P, const Vector& direction, const LpSolver& lp = default_lp_solver());

/// Maximal controlled invariant subset of S0: S_{k+1} = pre(S_k) intersected with S0.
MaxCisResult max_cis(const Polytope& S0, const DiscreteSystem& d, const Polytope& U, int max_iter,
                     double tol = 1e-7, const LpSolver& lp = default_lp_solver());

ChebyshevBall chebyshev_center(const Polytope& P, const LpSolver& lp = default_lp_solver());

/// Vertex enumeration by facet subsets; dimension <= 3.
PointList vertices(const Polytope& P, double tol = 1e-9);

/// Vertices of a planar polygon in counter-clockwise order.
PointList ordered_vertices_2d(const Polytope& P, double tol = 1e-9);

}  // namespace impzone
