#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "impzone/config.hpp"
#include "impzone/sim.hpp"

namespace fs = std::filesystem;
using namespace impzone;

namespace {

constexpr int kOk = 0;
constexpr int kInvalidConfig = 2;
constexpr int kSolverFailure = 3;
constexpr int kInfeasible = 4;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverFailure:
    case ErrorCode::NoConvergence:
    case ErrorCode::IllConditionedEigenbasis:
      return kSolverFailure;
    case ErrorCode::InfeasibleProblem:
    case ErrorCode::EmptyResult:
    case ErrorCode::EmptyPolytope:
    case ErrorCode::DegenerateHull:
      return kInfeasible;
    default:
      return kInvalidConfig;
  }
}

int report_error(const std::string& code, const std::string& message, int status) {
  Json j = {{"error", {{"code", code}, {"message", message}, {"exit_code", status}}}};
  std::cerr << j.dump(2) << "\n";
  return status;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Vector parse_point(const std::string& text, Eigen::Index n, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, flag + ": cannot parse \"" + item + "\"");
    }
  }
  if (static_cast<Eigen::Index>(vals.size()) != n) {
    throw Error(ErrorCode::InvalidConfig, flag + " needs " + std::to_string(n) + " comma separated values");
  }
  return Eigen::Map<Vector>(vals.data(), n);
}

struct Common {
  std::string config;
  std::string out;
  std::optional<unsigned> seed;
};

ProblemConfig load(const Common& c) {
  ProblemConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

fs::path prepare_out(const ProblemConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_sets(const Common& c) {
  const ProblemConfig cfg = load(c);
  const SetsResult s = compute_sets(cfg);
  const fs::path dir = prepare_out(cfg);
  write_json(dir / "x_admissible_inner.json", to_json(s.state_admissible));
  write_json(dir / "target_admissible_inner.json", to_json(s.report.admissible_inner));
  write_json(dir / "target_invariant.json", to_json(s.report.icis));
  write_json(dir / "ces.json", ces_json(s));
  write_json(dir / "ices.json", {{"nonempty", s.report.ices_nonempty},
                                 {"inputs", to_json(s.report.ices)},
                                 {"states", to_json(s.report.ices_states)}});
  Json rep = to_json(s.report);
  rep["seed"] = cfg.seed;
  write_json(dir / "validity_report.json", rep);
  std::cout << "valid: " << to_string(s.report.valid) << " (" << s.report.method << ")\n";
  if (!s.report.message.empty()) std::cout << s.report.message << "\n";
  std::cout << "wrote " << dir.string() << "\n";
  return s.report.valid == Validity::Valid ? kOk : kInfeasible;
}

int cmd_simulate(const Common& c, const std::string& controller, const std::string& x0_text, int steps) {
  ProblemConfig cfg = load(c);
  if (!controller.empty()) cfg.controller = controller;
  const MpcVariant variant = parse_variant(cfg.controller);
  if (steps > 0) cfg.steps = steps;
  if (!x0_text.empty()) cfg.x0 = parse_point(x0_text, cfg.A.rows(), "--x0");
  if (!cfg.x0) throw Error(ErrorCode::InvalidConfig, "no initial state: set simulation.x0 or pass --x0");

  const SetsResult s = compute_sets(cfg);
  if (s.report.valid != Validity::Valid) {
    return report_error("InvalidTarget", "target is not valid: " + s.report.message, kInfeasible);
  }
  MpcController ctl(make_mpc_config(cfg, s, variant));
  const fs::path dir = prepare_out(cfg);
  const std::string stem = "trajectory_" + cfg.controller;

  auto dump = [&](const Trajectory& traj) {
    std::ofstream csv(dir / (stem + ".csv"));
    write_csv(csv, traj);
    Json j = to_json(traj);
    if (traj.steps() > 0) {
      j["violations"] = to_json(check_violations(traj, s.system.state_set, s.report.target, 1e-9, &s.modal));
    }
    const auto inside = first_step_inside(traj, s.report.icis);
    j["invariant_from_step"] = inside ? Json(*inside) : Json(nullptr);
    write_json(dir / (stem + ".json"), j);
  };

  try {
    const Trajectory traj = run_closed_loop(s.system, s.modal, ctl, *cfg.x0, cfg.steps, cfg.samples_per_interval);
    dump(traj);
    const ViolationReport v = check_violations(traj, s.system.state_set, s.report.target, 1e-9, &s.modal);
    const auto inside = first_step_inside(traj, s.report.icis);
    std::cout << "steps: " << traj.steps() << "\nfinal: " << traj.post.back().transpose() << "\n"
              << "state violations: " << v.state_violations << " (max " << v.max_state_violation << ")\n"
              << "in target zone from t = " << (v.settling_time ? std::to_string(*v.settling_time) : "never")
              << "\nin invariant set from step: " << (inside ? std::to_string(*inside) : "never")
              << "\nwrote " << (dir / (stem + ".csv")).string() << "\n";
  } catch (const InfeasibleRunError& e) {
    dump(e.partial());
    return report_error("InfeasibleProblem", e.detail(), kInfeasible);
  }
  return kOk;
}

int cmd_check(const Common& c, const std::string& x_text, const std::string& which) {
  const ProblemConfig cfg = load(c);
  const ImpulsiveSystem sys = make_system(cfg);
  const ModalDecomposition md(sys.A, modal_options(cfg));
  const Vector x = parse_point(x_text, cfg.A.rows(), "--x");
  Polytope Y = sys.state_set;
  if (which == "target") {
    Y = intersect(cfg.target.polytope(), sys.state_set);
  } else if (which != "state") {
    throw Error(ErrorCode::InvalidConfig, "--set must be \"state\" or \"target\"");
  }
  AdmissibilityOptions ao;
  ao.slack_tol = cfg.slack_tol;
  ao.marginal_tol = cfg.marginal_tol;
  const SpectrahedronSet S(md, Y, sys.period, ao);
  const AdmissibilityResult r = is_admissible(S, x);
  const bool grid = grid_oracle(md, Y, x, sys.period, cfg.grid_samples);
  Json j = {{"x", to_json(x)},
            {"set", which},
            {"sdp", to_json(r)},
            {"grid", {{"admissible", grid}, {"samples", cfg.grid_samples}}},
            {"agree", grid == r.admissible}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Admissible sets, invariant targets and zone MPC for impulsively controlled linear systems"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "problem description (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", common.seed, "seed for randomized direction sets");
  };

  CLI::App* sets = app.add_subcommand("sets", "compute admissible, invariant and equilibrium sets");
  add_common(sets);

  CLI::App* sim = app.add_subcommand("simulate", "run the closed loop and export the trajectory");
  add_common(sim);
  std::string controller, x0_text;
  int steps = 0;
  sim->add_option("--controller", controller, "tracking or setbased")->check(CLI::IsMember({"tracking", "setbased"}));
  sim->add_option("--x0", x0_text, "initial state, e.g. \"3.0,0.15\"");
  sim->add_option("--steps", steps, "number of impulses")->check(CLI::PositiveNumber);

  CLI::App* check = app.add_subcommand("check", "admissibility of one point by SDP certificate and grid oracle");
  add_common(check);
  std::string x_text, which = "state";
  check->add_option("--x", x_text, "point, e.g. \"3.0,0.15\"")->required();
  check->add_option("--set", which, "state or target")->check(CLI::IsMember({"state", "target"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("InvalidArguments", e.what(), kInvalidConfig);
  }

  try {
    if (*sets) return cmd_sets(common);
    if (*sim) return cmd_simulate(common, controller, x0_text, steps);
    if (*check) return cmd_check(common, x_text, which);
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.code())), e.detail(), exit_code(e.code()));
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), kSolverFailure);
  }
  return kOk;
}
