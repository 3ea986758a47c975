#pragma once

#include <string_view>

#include "impzone/lp.hpp"
#include "impzone/types.hpp"

namespace impzone {

enum class QpStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

std::string_view to_string(QpStatus status);

/// min 1/2 z'Pz + q'z  s.t.  G z <= h,  E z = f.
struct QpData {
  Matrix P;
  Vector q;
  Matrix G;
  Vector h;
  Matrix E;
  Vector f;

  static QpData over(Eigen::Index n);
  Eigen::Index num_variables() const { return q.size(); }
};

struct QpResult {
  QpStatus status = QpStatus::NumericalFailure;
  Vector x;
  Vector eq_multipliers;
  Vector ineq_multipliers;
  double objective = 0.0;
  int iterations = 0;

  bool optimal() const { return status == QpStatus::Optimal; }
};

class QpSolver {
 public:
  virtual ~QpSolver() = default;
  virtual QpResult solve(const QpData& problem) const = 0;
};

struct InteriorPointQpOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
  double regularization = 1e-12;
  /// Run a simplex phase one first so infeasible problems are reported as such.
  bool check_feasibility = true;
};

/// Dense Mehrotra predictor-corrector interior point method.
class InteriorPointQpSolver final : public QpSolver {
 public:
  explicit InteriorPointQpSolver(InteriorPointQpOptions options = {},
                                 const LpSolver& lp = default_lp_solver())
      : options_(options), lp_(&lp) {}
  QpResult solve(const QpData& problem) const override;

 private:
  InteriorPointQpOptions options_;
  const LpSolver* lp_;
};

const QpSolver& default_qp_solver();

}  // namespace impzone
