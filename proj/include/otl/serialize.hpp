#pragma once

// JSON conversions for measures, matrices, solver results and summaries.

#include <json.hpp>

#include "otl/bootstrap.hpp"
#include "otl/limitlaw.hpp"

namespace otl {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const DiscreteMeasure& mu);
Json to_json(const OtSolution& sol);
Json to_json(const Summary& s);

/// Numeric vector from a JSON array.
Vector vector_from_json(const Json& j, const std::string& what);
/// Row-major matrix from an array of equal-length arrays.
Matrix matrix_from_json(const Json& j, const std::string& what);
/// {"atoms": [[x..], ...] or [x, ...], "weights": [...]}; weights default to
/// uniform.
DiscreteMeasure measure_from_json(const Json& j, const std::string& what);

/// Summary of a 1D law (mean, std, quantiles).
Summary summarize(const EmpiricalLaw1D& law);

}  // namespace otl
