#pragma once

#include <string_view>

#include "impzone/types.hpp"

namespace impzone {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus status);

/// min c'z  s.t.  G z <= h,  E z = f,  z free.
struct LpProblem {
  Vector c;
  Matrix G;
  Vector h;
  Matrix E;
  Vector f;

  /// Empty problem over `n` variables (no constraints, zero objective).
  static LpProblem over(Eigen::Index n);

  Eigen::Index num_variables() const { return c.size(); }
};

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  Vector x;
  double objective = 0.0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual LpResult solve(const LpProblem& problem) const = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-10;
  /// Phase-one residual (relative to the row scale) above which the problem is infeasible.
  double feasibility_tol = 1e-9;
  int max_iterations = 20000;
  /// Number of consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 50;
};

/// Dense two-phase tableau simplex. Free variables are split, inequalities get
/// slacks; the basic solution is re-solved with an LU of the final basis.
class DenseSimplexSolver final : public LpSolver {
 public:
  explicit DenseSimplexSolver(SimplexOptions options = {}) : options_(options) {}
  LpResult solve(const LpProblem& problem) const override;

 private:
  SimplexOptions options_;
};

/// Shared stateless solver used when callers do not supply one.
const LpSolver& default_lp_solver();

}  // namespace impzone
