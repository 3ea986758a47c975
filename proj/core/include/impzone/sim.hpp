#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "impzone/lti.hpp"
#include "impzone/mpc.hpp"
#include "impzone/polytope.hpp"

namespace impzone {

struct DenseSample {
  double t = 0.0;
  Vector x;
  int segment = 0;
};

/// Closed-loop record. Index k runs over impulse times tau_k = k T:
/// post[k] = x(tau_k), pre[k] = x(tau_k^-) (pre[0] = post[0] = x0), and
/// inputs[k] = u(tau_k), computed at tau_k and added at tau_{k+1}.
struct Trajectory {
  double period = 1.0;
  int samples_per_interval = 0;
  std::string controller;
  std::string config_hash;
  std::vector<Vector> post;
  std::vector<Vector> pre;
  std::vector<Vector> inputs;
  std::vector<double> costs;
  std::vector<DenseSample> samples;

  int steps() const { return static_cast<int>(inputs.size()); }
};

class Controller {
 public:
  struct Decision {
    Vector u;
    std::optional<double> cost;
  };
  virtual ~Controller() = default;
  virtual Decision decide(const Vector& x) = 0;
  virtual std::string name() const = 0;
};

class MpcController final : public Controller {
 public:
  explicit MpcController(MpcConfig cfg, const QpSolver& solver = default_qp_solver())
      : cfg_(std::move(cfg)), solver_(&solver) {}
  Decision decide(const Vector& x) override;
  std::string name() const override { return std::string(to_string(cfg_.variant)); }
  const MpcConfig& config() const { return cfg_; }
  const std::optional<ControlStep>& last_step() const { return last_; }

 private:
  MpcConfig cfg_;
  const QpSolver* solver_;
  std::optional<ControlStep> last_;
};

/// Applies the same input at every impulse.
class HoldController final : public Controller {
 public:
  explicit HoldController(Vector u) : u_(std::move(u)) {}
  Decision decide(const Vector&) override { return {u_, std::nullopt}; }
  std::string name() const override { return "hold"; }

 private:
  Vector u_;
};

/// Carries the trajectory recorded up to the step whose QP failed.
class InfeasibleRunError : public Error {
 public:
  InfeasibleRunError(const std::string& message, Trajectory partial, int step)
      : Error(ErrorCode::InfeasibleProblem, message), partial_(std::move(partial)), step_(step) {}
  const Trajectory& partial() const { return partial_; }
  int step() const { return step_; }

 private:
  Trajectory partial_;
  int step_;
};

/// Exact flow between impulses with `samples_per_interval` points on each
/// closed interval [tau_k, tau_{k+1}].
Trajectory run_closed_loop(const ImpulsiveSystem& sys, const ModalDecomposition& md, Controller& controller,
                           const Vector& x0, int steps, int samples_per_interval = 101);
Trajectory run_closed_loop(const ImpulsiveSystem& sys, Controller& controller, const Vector& x0, int steps,
                           int samples_per_interval = 101);

struct ViolationReport {
  std::vector<bool> in_state;
  std::vector<bool> in_target;
  std::size_t state_violations = 0;
  std::optional<std::size_t> first_state_violation;
  /// Largest facet excess over X seen at samples (and between them when refined); 0 if none.
  double max_state_violation = 0.0;
  /// First dense sample from which every later sample lies in the target.
  std::optional<std::size_t> settling_index;
  std::optional<double> settling_time;
};

/// Passing `md` refines the state check between neighbouring samples near facets.
ViolationReport check_violations(const Trajectory& traj, const Polytope& X, const Polytope& target, double tol = 1e-9,
                                 const ModalDecomposition* md = nullptr);

/// Smallest k such that every post-jump state from k on lies in P.
std::optional<int> first_step_inside(const Trajectory& traj, const Polytope& P, double tol = 1e-9);

/// Columns t,x1..xn,segment,phase; dense rows are "pre" (flow before the next
/// jump), one "post" row per impulse time holds x(tau_k).
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace impzone
