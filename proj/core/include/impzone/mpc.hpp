#pragma once

#include <string_view>
#include <vector>

#include "impzone/lti.hpp"
#include "impzone/polytope.hpp"
#include "impzone/qp.hpp"

namespace impzone {

enum class MpcVariant { ArtificialVariables, SetBased };

std::string_view to_string(MpcVariant v);

struct MpcConfig {
  DiscreteSystem plant;
  int horizon = 5;
  Matrix Q;
  Matrix R;
  Matrix Q_O;
  Polytope state_admissible;   // inner approximation of the admissible state set
  Polytope inputs;
  Polytope target_admissible;  // inner approximation of the admissible target
  Polytope invariant;          // impulsive controlled invariant set in the target
  Matrix G;                    // equilibrium gain
  MpcVariant variant = MpcVariant::ArtificialVariables;

  /// Throws InvalidArgument / DimensionMismatch on inconsistent data.
  void validate() const;
};

/// Offsets of each block in the decision vector.
struct QpLayout {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  int N = 0;
  Eigen::Index size = 0;
  Eigen::Index u0 = 0;      // u(0..N-1)
  Eigen::Index x1 = 0;      // x(1..N)
  Eigen::Index xs = -1;     // tracking only
  Eigen::Index us = -1;
  Eigen::Index xstar = -1;
  Eigen::Index xstar0 = -1;  // set-based only: x*(0..N)
  Eigen::Index ustar0 = -1;  //                 u*(0..N-1)

  Eigen::Index u(int j) const { return u0 + j * m; }
  Eigen::Index x(int j) const { return x1 + (j - 1) * n; }  // j = 1..N
  Eigen::Index xs_star(int j) const { return xstar0 + j * n; }
  Eigen::Index us_star(int j) const { return ustar0 + j * m; }
};

struct QpProblem {
  QpData data;
  QpLayout layout;
  MpcVariant variant = MpcVariant::ArtificialVariables;
  /// Cost = 1/2 z'Pz + q'z + constant.
  double constant = 0.0;

  double cost(const Vector& z) const;
};

QpProblem build_tracking_qp(const Vector& x, const MpcConfig& cfg);
QpProblem build_setbased_qp(const Vector& x, const MpcConfig& cfg);
QpProblem build_qp(const Vector& x, const MpcConfig& cfg);

struct ControlStep {
  Vector u;
  double cost = 0.0;
  int iterations = 0;
  std::vector<Vector> inputs;            // u(0..N-1)
  std::vector<Vector> predicted_states;  // x(0..N)
  Vector xs, us, xstar;                  // tracking
  std::vector<Vector> xstar_seq;         // set-based x*(0..N)
  std::vector<Vector> ustar_seq;         // set-based u*(0..N-1)
};

/// Raised when the QP at the current state has no solution.
class InfeasibleProblemError : public Error {
 public:
  explicit InfeasibleProblemError(const std::string& message) : Error(ErrorCode::InfeasibleProblem, message) {}
};

/// Receding-horizon law: solves the QP at x and returns its first input.
ControlStep control_step(const Vector& x, const MpcConfig& cfg, const QpSolver& solver = default_qp_solver());

}  // namespace impzone
