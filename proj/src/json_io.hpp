#pragma once

#include <nlohmann/json.hpp>

#include "cwpotts/inference.hpp"
#include "cwpotts/phase.hpp"

namespace cwpotts {

nlohmann::json spec_json(const ModelSpec& spec);
nlohmann::json point_class_json(const PointClass& cls);
nlohmann::json landmarks_json(int p, int q, const Landmarks& lm);
nlohmann::json estimation_json(const EstimationResult& r);
nlohmann::json confidence_json(const ConfidenceSet& cs);

}  // namespace cwpotts
