#pragma once

#include "json.hpp"

#include "garrote/glm.hpp"
#include "garrote/inference.hpp"
#include "garrote/reporting.hpp"
#include "garrote/selectors.hpp"
#include "garrote/tuning.hpp"

namespace garrote {

// JSON views of the result types. Matrices are written row-major as arrays of rows;
// NaN becomes null.

nlohmann::json vector_json(const Vector& v);
nlohmann::json matrix_json(const Matrix& m);

void to_json(nlohmann::json& j, const FitResult& f);
void to_json(nlohmann::json& j, const CollinearityReport& c);
void to_json(nlohmann::json& j, const PathFit& f);
void to_json(nlohmann::json& j, const InitialEstimate& e);
void to_json(nlohmann::json& j, const SelectorFit& f);
void to_json(nlohmann::json& j, const CVResult& r);
void to_json(nlohmann::json& j, const FoldPrediction& f);
void to_json(nlohmann::json& j, const PredictionReport& r);
void to_json(nlohmann::json& j, const SandwichSE& s);
void to_json(nlohmann::json& j, const BootstrapSummary& s);
void to_json(nlohmann::json& j, const BlandAltman& b);
void to_json(nlohmann::json& j, const ComparisonTable& t);

/// SelectorFit with variable names attached to coefficients and the selected set.
nlohmann::json named_fit_json(const SelectorFit& f, const std::vector<std::string>& names);

}  // namespace garrote
