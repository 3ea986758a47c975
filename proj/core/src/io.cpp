#include "impzone/io.hpp"

namespace impzone {

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(std::move(row));
  }
  return j;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::InvalidConfig, "expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidConfig, "expected a nonempty matrix");
  if (!j.front().is_array()) {
    const Vector v = vector_from_json(j);
    return Matrix(v);
  }
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::InvalidConfig, "ragged matrix");
    m.row(static_cast<Eigen::Index>(i)) = vector_from_json(j[i]).transpose();
  }
  return m;
}

Json to_json(const Polytope& p) {
  Json j;
  j["dim"] = p.dim();
  j["H"] = to_json(p.H());
  j["v"] = to_json(p.v());
  if (p.is_empty()) j["empty"] = true;
  if (p.dim() <= 3 && !p.is_empty() && p.num_facets() > 0) {
    PointList verts = p.dim() == 2 ? ordered_vertices_2d(p) : vertices(p);
    Json vs = Json::array();
    for (const auto& v : verts) vs.push_back(to_json(v));
    j["vertices"] = std::move(vs);
  }
  return j;
}

Polytope polytope_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("H") || !j.contains("v")) {
    throw Error(ErrorCode::InvalidConfig, "polytope needs \"H\" and \"v\"");
  }
  const Vector v = vector_from_json(j.at("v"));
  Matrix H;
  if (j.at("H").empty()) {
    const auto dim = j.value("dim", 0);
    H = Matrix(0, dim);
  } else {
    H = matrix_from_json(j.at("H"));
  }
  if (j.value("empty", false)) return Polytope::empty(H.cols());
  return Polytope(H, v);
}

Json to_json(const AdmissibilityResult& r) {
  Json j;
  j["admissible"] = r.admissible;
  j["marginal"] = r.marginal;
  j["in_ambient"] = r.in_ambient;
  j["margin"] = std::isfinite(r.margin) ? Json(r.margin) : Json(nullptr);
  Json certs = Json::array();
  for (const auto& c : r.certificates) {
    certs.push_back({{"Y1", to_json(c.Y1)}, {"Y2", to_json(c.Y2)}, {"margin", c.margin}});
  }
  j["certificates"] = std::move(certs);
  return j;
}

Json to_json(const TargetValidityReport& r) {
  Json j;
  j["valid"] = std::string(to_string(r.valid));
  j["ices_nonempty"] = r.ices_nonempty;
  j["target"] = to_json(r.target);
  j["effective_target"] = to_json(r.effective_target);
  j["admissible_inner"] = to_json(r.admissible_inner);
  j["icis"] = to_json(r.icis);
  j["ices"] = to_json(r.ices);
  j["ices_states"] = to_json(r.ices_states);
  j["diagnostics"] = {{"method", r.method},
                      {"cis_iterations", r.cis_iterations},
                      {"cis_converged", r.cis_converged},
                      {"growth_iterations", r.growth_iterations},
                      {"growth_converged", r.growth_converged},
                      {"directions", r.directions},
                      {"max_iter", r.max_iter},
                      {"tol", r.tol},
                      {"message", r.message}};
  return j;
}

Json to_json(const QpProblem& qp) {
  const QpLayout& L = qp.layout;
  Json layout = {{"n", L.n}, {"m", L.m}, {"N", L.N}, {"size", L.size}, {"u0", L.u0}, {"x1", L.x1}};
  if (qp.variant == MpcVariant::ArtificialVariables) {
    layout["xs"] = L.xs;
    layout["us"] = L.us;
    layout["xstar"] = L.xstar;
  } else {
    layout["xstar0"] = L.xstar0;
    layout["ustar0"] = L.ustar0;
  }
  return {{"variant", std::string(to_string(qp.variant))},
          {"layout", layout},
          {"P", to_json(qp.data.P)},
          {"q", to_json(qp.data.q)},
          {"G", to_json(qp.data.G)},
          {"h", to_json(qp.data.h)},
          {"E", to_json(qp.data.E)},
          {"f", to_json(qp.data.f)},
          {"constant", qp.constant}};
}

Json to_json(const Trajectory& traj) {
  Json j;
  j["period"] = traj.period;
  j["samples_per_interval"] = traj.samples_per_interval;
  j["controller"] = traj.controller;
  j["config_hash"] = traj.config_hash;
  Json impulses = Json::array();
  for (std::size_t k = 0; k < traj.post.size(); ++k) {
    Json rec = {{"k", k}, {"t", static_cast<double>(k) * traj.period}, {"pre", to_json(traj.pre[k])},
                {"post", to_json(traj.post[k])}};
    if (k < traj.inputs.size()) {
      rec["u"] = to_json(traj.inputs[k]);
      rec["cost"] = std::isnan(traj.costs[k]) ? Json(nullptr) : Json(traj.costs[k]);
    }
    impulses.push_back(std::move(rec));
  }
  j["impulses"] = std::move(impulses);
  Json dense = Json::array();
  for (const auto& s : traj.samples) dense.push_back({{"t", s.t}, {"x", to_json(s.x)}, {"segment", s.segment}});
  j["samples"] = std::move(dense);
  return j;
}

Json to_json(const ViolationReport& r) {
  Json j;
  j["samples"] = r.in_state.size();
  j["state_violations"] = r.state_violations;
  j["first_state_violation"] = r.first_state_violation ? Json(*r.first_state_violation) : Json(nullptr);
  j["max_state_violation"] = r.max_state_violation;
  j["settling_index"] = r.settling_index ? Json(*r.settling_index) : Json(nullptr);
  j["settling_time"] = r.settling_time ? Json(*r.settling_time) : Json(nullptr);
  return j;
}

}  // namespace impzone
