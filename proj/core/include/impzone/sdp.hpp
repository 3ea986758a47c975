#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "impzone/types.hpp"

namespace impzone {

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };

std::string_view to_string(SdpStatus status);

/// maximize b'y  subject to  F_j(y) = F_j0 + sum_k y_k F_jk  PSD for every block j.
///
/// Linear inequalities are written as 1x1 blocks. Coefficient matrices must be
/// symmetric; only the nonzero terms are stored.
class LmiProblem {
 public:
  struct Block {
    Matrix constant;
    std::vector<std::pair<Eigen::Index, Matrix>> terms;
  };

  explicit LmiProblem(Eigen::Index num_variables);

  Eigen::Index num_variables() const { return objective_.size(); }
  Vector& objective() { return objective_; }
  const Vector& objective() const { return objective_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  Eigen::Index add_block(Matrix constant);
  /// F_{block,var} += coeff.
  void add_term(Eigen::Index block, Eigen::Index var, const Matrix& coeff);
  /// Adds the scalar inequality  constant + row' y >= 0.
  void add_linear_inequality(double constant, const RowVector& row);

  /// F_j(y) for every block.
  std::vector<Matrix> evaluate(const Vector& y) const;

 private:
  Vector objective_;
  std::vector<Block> blocks_;
};

struct SdpResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  Vector y;
  std::vector<Matrix> slack;  // F_j(y)
  std::vector<Matrix> dual;   // primal matrix variables X_j
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;

  bool optimal() const { return status == SdpStatus::Optimal; }
};

class SdpSolver {
 public:
  virtual ~SdpSolver() = default;
  virtual SdpResult solve(const LmiProblem& problem) const = 0;
};

struct PrimalDualSdpOptions {
  double tolerance = 1e-9;
  double acceptable_tolerance = 1e-7;
  int max_iterations = 150;
  double step_fraction = 0.95;
  double divergence_bound = 1e10;
};

/// Infeasible-start primal-dual path following with the HKM search direction
/// and a Mehrotra predictor-corrector. Dense; meant for small blocks.
class PrimalDualSdpSolver final : public SdpSolver {
 public:
  explicit PrimalDualSdpSolver(PrimalDualSdpOptions options = {}) : options_(options) {}
  SdpResult solve(const LmiProblem& problem) const override;

 private:
  PrimalDualSdpOptions options_;
};

const SdpSolver& default_sdp_solver();

}  // namespace impzone
