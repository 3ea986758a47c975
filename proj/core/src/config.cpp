#include "impzone/config.hpp"

#include <fstream>

namespace impzone {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidConfig, "missing \"" + where + key + "\"");
  return j.at(key);
}

SetSpec parse_set(const Json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
  if (j.contains("lower") || j.contains("upper")) {
    return SetSpec::box(vector_from_json(require(j, "lower", where + ".")), vector_from_json(require(j, "upper", where + ".")));
  }
  Matrix H = matrix_from_json(require(j, "H", where + "."));
  Vector v = vector_from_json(require(j, "v", where + "."));
  if (H.rows() != v.size()) throw Error(ErrorCode::InvalidConfig, where + ": H and v row counts differ");
  return SetSpec::hrep(std::move(H), std::move(v));
}

Json set_json(const SetSpec& s) {
  if (s.is_box()) return {{"lower", to_json(*s.lower)}, {"upper", to_json(*s.upper)}};
  return {{"H", to_json(s.H)}, {"v", to_json(s.v)}};
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad type for \"" + where + key + "\"");
  }
}

Matrix square_or_scalar(const Json& j, Eigen::Index size, const std::string& name) {
  Matrix M;
  if (j.is_number()) {
    M = j.get<double>() * Matrix::Identity(size, size);
  } else {
    M = matrix_from_json(j);
  }
  if (M.rows() != size || M.cols() != size) throw Error(ErrorCode::InvalidConfig, name + " has wrong size");
  return M;
}

}  // namespace

SetSpec SetSpec::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw Error(ErrorCode::InvalidConfig, "box bounds differ in length");
  SetSpec s;
  s.lower = std::move(lo);
  s.upper = std::move(hi);
  return s;
}

SetSpec SetSpec::hrep(Matrix H, Vector v) {
  SetSpec s;
  s.H = std::move(H);
  s.v = std::move(v);
  return s;
}

Polytope SetSpec::polytope() const { return is_box() ? Polytope::box(*lower, *upper) : Polytope(H, v); }

bool SetSpec::operator==(const SetSpec& o) const {
  if (is_box() != o.is_box()) return false;
  if (is_box()) return *lower == *o.lower && *upper == *o.upper;
  return H.rows() == o.H.rows() && H.cols() == o.H.cols() && H == o.H && v == o.v;
}

bool ProblemConfig::operator==(const ProblemConfig& o) const {
  auto same = [](const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; };
  return same(A, o.A) && same(B, o.B) && period == o.period && state_set == o.state_set &&
         input_set == o.input_set && target == o.target && horizon == o.horizon && same(Q, o.Q) && same(R, o.R) &&
         same(Q_O, o.Q_O) && Q_f.has_value() == o.Q_f.has_value() && (!Q_f || same(*Q_f, *o.Q_f)) &&
         directions == o.directions && samples_per_interval == o.samples_per_interval && max_iter == o.max_iter &&
         seed == o.seed && grid_samples == o.grid_samples && rational_tol == o.rational_tol &&
         max_denominator == o.max_denominator && condition_bound == o.condition_bound && cis_tol == o.cis_tol &&
         slack_tol == o.slack_tol && marginal_tol == o.marginal_tol && x0.has_value() == o.x0.has_value() &&
         (!x0 || *x0 == *o.x0) && steps == o.steps && controller == o.controller && output_dir == o.output_dir;
}

ProblemConfig parse_config(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  ProblemConfig c;
  const Json& sys = require(j, "system", "");
  c.A = matrix_from_json(require(sys, "A", "system."));
  c.B = matrix_from_json(require(sys, "B", "system."));
  c.period = get_or<double>(sys, "period", 1.0, "system.");
  const Eigen::Index n = c.A.rows();
  if (c.A.cols() != n) throw Error(ErrorCode::InvalidConfig, "system.A must be square");
  if (c.B.rows() != n) throw Error(ErrorCode::InvalidConfig, "system.B must have as many rows as A");
  if (!(c.period > 0.0)) throw Error(ErrorCode::InvalidConfig, "system.period must be positive");
  const Eigen::Index m = c.B.cols();

  c.state_set = parse_set(require(j, "state_set", ""), "state_set");
  c.input_set = parse_set(require(j, "input_set", ""), "input_set");
  c.target = parse_set(require(j, "target", ""), "target");
  auto dim = [](const SetSpec& s) { return s.is_box() ? s.lower->size() : s.H.cols(); };
  if (dim(c.state_set) != n || dim(c.target) != n) throw Error(ErrorCode::InvalidConfig, "state set dimension");
  if (dim(c.input_set) != m) throw Error(ErrorCode::InvalidConfig, "input set dimension");

  const Json mpc = j.value("mpc", Json::object());
  c.horizon = get_or<int>(mpc, "horizon", 5, "mpc.");
  if (c.horizon < 1) throw Error(ErrorCode::InvalidConfig, "mpc.horizon must be at least 1");
  c.Q = mpc.contains("Q") ? square_or_scalar(mpc.at("Q"), n, "mpc.Q") : Matrix(Matrix::Identity(n, n));
  c.R = mpc.contains("R") ? square_or_scalar(mpc.at("R"), m, "mpc.R") : Matrix(Matrix::Identity(m, m));
  c.Q_O = mpc.contains("Q_O") ? square_or_scalar(mpc.at("Q_O"), n, "mpc.Q_O") : Matrix(Matrix::Identity(n, n));
  if (mpc.contains("Q_f")) c.Q_f = square_or_scalar(mpc.at("Q_f"), n, "mpc.Q_f");

  const Json ap = j.value("approximation", Json::object());
  c.directions = get_or<int>(ap, "directions", 16, "approximation.");
  c.samples_per_interval = get_or<int>(ap, "samples_per_interval", 101, "approximation.");
  c.max_iter = get_or<int>(ap, "max_iter", 50, "approximation.");
  c.seed = get_or<unsigned>(ap, "seed", 0u, "approximation.");
  c.grid_samples = get_or<int>(ap, "grid_samples", 2001, "approximation.");
  if (c.directions < n + 1) throw Error(ErrorCode::InvalidConfig, "approximation.directions must be at least n+1");
  if (c.samples_per_interval < 2 || c.grid_samples < 2) {
    throw Error(ErrorCode::InvalidConfig, "sample counts must be at least 2");
  }
  if (c.max_iter < 1) throw Error(ErrorCode::InvalidConfig, "approximation.max_iter must be positive");

  const Json tl = j.value("tolerances", Json::object());
  c.rational_tol = get_or<double>(tl, "rational", 1e-6, "tolerances.");
  c.max_denominator = get_or<long>(tl, "max_denominator", 1000, "tolerances.");
  c.condition_bound = get_or<double>(tl, "condition", 1e8, "tolerances.");
  c.cis_tol = get_or<double>(tl, "cis", 1e-7, "tolerances.");
  c.slack_tol = get_or<double>(tl, "slack", 1e-7, "tolerances.");
  c.marginal_tol = get_or<double>(tl, "marginal", 1e-5, "tolerances.");

  const Json sim = j.value("simulation", Json::object());
  if (sim.contains("x0")) {
    c.x0 = vector_from_json(sim.at("x0"));
    if (c.x0->size() != n) throw Error(ErrorCode::InvalidConfig, "simulation.x0 dimension");
  }
  c.steps = get_or<int>(sim, "steps", 10, "simulation.");
  c.controller = get_or<std::string>(sim, "controller", "tracking", "simulation.");
  parse_variant(c.controller);

  c.output_dir = get_or<std::string>(j, "output_dir", "out", "");
  return c;
}

Json to_json(const ProblemConfig& c) {
  Json j;
  j["system"] = {{"A", to_json(c.A)}, {"B", to_json(c.B)}, {"period", c.period}};
  j["state_set"] = set_json(c.state_set);
  j["input_set"] = set_json(c.input_set);
  j["target"] = set_json(c.target);
  j["mpc"] = {{"horizon", c.horizon}, {"Q", to_json(c.Q)}, {"R", to_json(c.R)}, {"Q_O", to_json(c.Q_O)}};
  if (c.Q_f) j["mpc"]["Q_f"] = to_json(*c.Q_f);
  j["approximation"] = {{"directions", c.directions},
                        {"samples_per_interval", c.samples_per_interval},
                        {"max_iter", c.max_iter},
                        {"seed", c.seed},
                        {"grid_samples", c.grid_samples}};
  j["tolerances"] = {{"rational", c.rational_tol}, {"max_denominator", c.max_denominator},
                     {"condition", c.condition_bound}, {"cis", c.cis_tol},
                     {"slack", c.slack_tol},           {"marginal", c.marginal_tol}};
  j["simulation"] = {{"steps", c.steps}, {"controller", c.controller}};
  if (c.x0) j["simulation"]["x0"] = to_json(*c.x0);
  j["output_dir"] = c.output_dir;
  return j;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

MpcVariant parse_variant(const std::string& name) {
  if (name == "tracking") return MpcVariant::ArtificialVariables;
  if (name == "setbased") return MpcVariant::SetBased;
  throw Error(ErrorCode::InvalidConfig, "controller must be \"tracking\" or \"setbased\", got \"" + name + "\"");
}

ImpulsiveSystem make_system(const ProblemConfig& c) {
  return ImpulsiveSystem(c.A, c.B, c.period, c.state_set.polytope(), c.input_set.polytope());
}

ModalOptions modal_options(const ProblemConfig& c) {
  ModalOptions o;
  o.rational.tol = c.rational_tol;
  o.rational.max_denominator = c.max_denominator;
  o.max_condition = c.condition_bound;
  return o;
}

ValidateOptions validate_options(const ProblemConfig& c) {
  ValidateOptions o;
  o.inner.directions = c.directions;
  o.inner.seed = c.seed;
  o.admissibility.slack_tol = c.slack_tol;
  o.admissibility.marginal_tol = c.marginal_tol;
  o.ices.inner = o.inner;
  o.max_iter = c.max_iter;
  o.tol = c.cis_tol;
  o.modal = modal_options(c);
  return o;
}

SetsResult compute_sets(const ProblemConfig& c) {
  ImpulsiveSystem sys = make_system(c);
  ModalDecomposition md(sys.A, modal_options(c));
  DiscreteSystem plant = discretize(sys, md);
  const ValidateOptions vo = validate_options(c);

  const SpectrahedronSet XA(md, sys.state_set, sys.period, vo.admissibility);
  Polytope x_inner = inner_polytope(XA, vo.inner);

  EquilibriumSet eq = equilibrium_line(plant, sys.input_set);
  Polytope ces = eq.states();
  TargetValidityReport rep = validate_target(c.target.polytope(), sys, vo);
  return SetsResult{std::move(sys), std::move(md), std::move(plant), std::move(x_inner),
                    std::move(eq),  std::move(ces), std::move(rep)};
}

MpcConfig make_mpc_config(const ProblemConfig& c, const SetsResult& s, MpcVariant variant) {
  MpcConfig m;
  m.plant = s.plant;
  m.horizon = c.horizon;
  m.Q = c.Q;
  m.R = c.R;
  m.Q_O = c.Q_O;
  m.inputs = s.system.input_set;
  m.target_admissible = s.report.admissible_inner;
  m.invariant = s.report.icis;
  m.G = s.equilibria.G;
  m.variant = variant;
  m.state_admissible = s.state_admissible;
  const Eigen::Index n = c.A.rows();
  if (!s.report.icis.is_empty() && n <= 3 && !is_subset(s.report.icis, s.state_admissible, 1e-9)) {
    PointList pts = vertices(s.state_admissible);
    for (const auto& v : vertices(s.report.icis)) pts.push_back(v);
    m.state_admissible = Polytope::hull(pts);
  }
  return m;
}

Json ces_json(const SetsResult& s) {
  Json j;
  j["G"] = to_json(s.equilibria.G);
  j["inputs"] = to_json(s.equilibria.inputs);
  j["states"] = to_json(s.ces);
  if (s.equilibria.G.cols() == 1) {
    const Vector one = Vector::Constant(1, 1.0);
    const double umax = support(s.equilibria.inputs, one);
    const double umin = -support(s.equilibria.inputs, -one);
    j["endpoints"] = {to_json(Vector(s.equilibria.G * umin)), to_json(Vector(s.equilibria.G * umax))};
  }
  return j;
}

}  // namespace impzone
