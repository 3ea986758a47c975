#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "impzone/invariance.hpp"
#include "impzone/io.hpp"
#include "impzone/mpc.hpp"

namespace impzone {

/// A polytope as written in a config: either a box or an explicit H-rep.
struct SetSpec {
  std::optional<Vector> lower;
  std::optional<Vector> upper;
  Matrix H;
  Vector v;

  static SetSpec box(Vector lower, Vector upper);
  static SetSpec hrep(Matrix H, Vector v);
  bool is_box() const { return lower.has_value(); }
  Polytope polytope() const;
  bool operator==(const SetSpec& o) const;
};

struct ProblemConfig {
  Matrix A;
  Matrix B;
  double period = 1.0;
  SetSpec state_set;
  SetSpec input_set;
  SetSpec target;

  int horizon = 5;
  Matrix Q;
  Matrix R;
  Matrix Q_O;
  std::optional<Matrix> Q_f;  // accepted and kept, no cost term uses it

  int directions = 16;
  int samples_per_interval = 101;
  int max_iter = 50;
  unsigned seed = 0;
  int grid_samples = 2001;

  double rational_tol = 1e-6;
  long max_denominator = 1000;
  double condition_bound = 1e8;
  double cis_tol = 1e-7;
  double slack_tol = 1e-7;
  double marginal_tol = 1e-5;

  std::optional<Vector> x0;
  int steps = 10;
  std::string controller = "tracking";
  std::string output_dir = "out";

  bool operator==(const ProblemConfig& o) const;
};

/// Throws Error(InvalidConfig) with the offending key on any problem.
ProblemConfig parse_config(const Json& j);
Json to_json(const ProblemConfig& cfg);
ProblemConfig load_config(const std::filesystem::path& path);

ImpulsiveSystem make_system(const ProblemConfig& cfg);
ModalOptions modal_options(const ProblemConfig& cfg);
ValidateOptions validate_options(const ProblemConfig& cfg);
MpcVariant parse_variant(const std::string& name);

struct SetsResult {
  ImpulsiveSystem system;
  ModalDecomposition modal;
  DiscreteSystem plant;
  Polytope state_admissible;
  EquilibriumSet equilibria;
  Polytope ces;  // {G u : u in U}
  TargetValidityReport report;
};

SetsResult compute_sets(const ProblemConfig& cfg);

/// Controller data for either variant. The state constraint is the inner
/// admissible polytope of X, enlarged to the hull with the invariant set when
/// the latter sticks out (both lie in the convex admissible set of X).
MpcConfig make_mpc_config(const ProblemConfig& cfg, const SetsResult& sets, MpcVariant variant);

Json ces_json(const SetsResult& sets);

}  // namespace impzone
