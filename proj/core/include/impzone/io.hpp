#pragma once

#include <nlohmann/json.hpp>

#include "impzone/admissible.hpp"
#include "impzone/invariance.hpp"
#include "impzone/mpc.hpp"
#include "impzone/polytope.hpp"
#include "impzone/sim.hpp"

namespace impzone {

using Json = nlohmann::json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j);
/// Accepts [[...], ...]; a flat list is read as a column.
Matrix matrix_from_json(const Json& j);

/// {"H": [[...]], "v": [...], "vertices": [...]} plus "empty" when flagged.
Json to_json(const Polytope& p);
Polytope polytope_from_json(const Json& j);

Json to_json(const AdmissibilityResult& r);
Json to_json(const TargetValidityReport& r);
Json to_json(const QpProblem& qp);
Json to_json(const Trajectory& traj);
Json to_json(const ViolationReport& r);

}  // namespace impzone
