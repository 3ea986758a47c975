#pragma once

#include <optional>
#include <string>

#include "impzone/admissible.hpp"
#include "impzone/lti.hpp"
#include "impzone/polytope.hpp"

namespace impzone {

/// Controlled equilibria x_s = G u_s, G = -(Ad - I)^{-1} Bd.
struct EquilibriumSet {
  Matrix G;
  Polytope inputs;
  std::optional<Polytope> restriction;

  Vector state(const Vector& u) const { return G * u; }
  /// {G u : u in inputs, G u in restriction} as a polytope in state space.
  Polytope states(const LpSolver& lp = default_lp_solver()) const;
};

EquilibriumSet equilibrium_line(const DiscreteSystem& d, const Polytope& U);

struct IcesOptions {
  /// Width at which the endpoint bisection stops (m = 1).
  double bisection_tol = 1e-10;
  InnerPolytopeOptions inner;  // used when m > 1
};

/// Inputs u in U whose equilibrium G u lies in S; empty polytope if none.
Polytope ices(const EquilibriumSet& eq, const SpectrahedronSet& S, const IcesOptions& options = {});

/// P subset of pre(P): every point of P can be kept in P by some input.
bool is_controlled_invariant(const Polytope& P, const DiscreteSystem& d, const Polytope& U, double tol = 1e-7,
                             const LpSolver& lp = default_lp_solver());

/// Increasing sequence K_0 = E, K_{k+1} = pre(K_k) intersected with S0, where E
/// is a set of equilibria inside S0. Every iterate is controlled invariant.
MaxCisResult grow_from_equilibria(const Polytope& E, const Polytope& S0, const DiscreteSystem& d,
                                  const Polytope& U, int max_iter, double tol = 1e-7,
                                  const LpSolver& lp = default_lp_solver());

enum class Validity { Valid, Invalid, Unknown };

std::string_view to_string(Validity v);

struct ValidateOptions {
  ModalOptions modal;
  InnerPolytopeOptions inner;
  AdmissibilityOptions admissibility;
  IcesOptions ices;
  int max_iter = 50;
  double tol = 1e-7;
};

struct TargetValidityReport {
  Polytope target;
  /// target intersected with the state set
  Polytope effective_target;
  Polytope admissible_inner;
  Polytope icis;
  /// admissible equilibrium inputs (u-space) and the matching equilibrium states
  Polytope ices;
  Polytope ices_states;
  bool ices_nonempty = false;
  Validity valid = Validity::Unknown;

  // diagnostics
  std::string method;  // "max_cis", "equilibrium_growth" or "none"
  int cis_iterations = 0;
  bool cis_converged = false;
  int growth_iterations = 0;
  bool growth_converged = false;
  int directions = 0;
  int max_iter = 0;
  double tol = 0.0;
  std::string message;
};

/// Builds T_A, its inner polytope, and an impulsive controlled invariant set
/// inside it. The maximal-CIS recursion is tried first; if it does not settle
/// within max_iter, the invariant set grown from admissible equilibria is used.
TargetValidityReport validate_target(const Polytope& target, const ImpulsiveSystem& sys,
                                     const ValidateOptions& options = {}, const SdpSolver& sdp = default_sdp_solver(),
                                     const LpSolver& lp = default_lp_solver());

}  // namespace impzone
