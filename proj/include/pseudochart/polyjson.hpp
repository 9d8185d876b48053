#pragma once

#include <json.hpp>

#include "pseudochart/multipoly.hpp"

namespace pseudochart {

// Polynomial documents: {"vars": [...], "terms": [{"e": [...], "c": "num/den" | [residues]}]}
// with an optional "field" entry ({"p": p, "k": k}) for finite-field coefficients.

nlohmann::json field_to_json(const FieldPtr& f);
FieldPtr field_from_json(const nlohmann::json& j);

nlohmann::json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const nlohmann::json& j, const FieldPtr& field);

nlohmann::json poly_to_json(const MultiPoly& p);
MultiPoly poly_from_json(const nlohmann::json& j);
/// Reads terms over an existing variable set; `j["vars"]` must match it when present.
MultiPoly poly_from_json(const nlohmann::json& j, const VarSet& vars);

}  // namespace pseudochart
