#pragma once

#include <string>

#include <json.hpp>

#include "divent/conditions.hpp"
#include "divent/estimators.hpp"
#include "divent/montecarlo.hpp"
#include "divent/oracle.hpp"

namespace divent::io {

using json = nlohmann::ordered_json;

// Serializes with every double printed at 17 significant digits, so the text
// round-trips to the identical bit pattern. Non-finite doubles become null.
std::string dump17(const json& value, int indent = 2);

json dist_to_json(const Distribution& dist);
Distribution dist_from_json(const nlohmann::json& j);

json index_to_json(const IndexSpec& index);
IndexSpec index_from_json(const nlohmann::json& j);
// Compact flag form: "shannon" or "power:MU,NU".
IndexSpec parse_index_text(const std::string& text);

json estimate_to_json(const Estimate& est);
Estimate estimate_from_json(const nlohmann::json& j);
std::string estimate_csv(const Estimate& est);

json condition_check_to_json(const ConditionCheck& check);

json experiment_to_json(const ExperimentConfig& config);
// Accepts either a bare experiment config or a run manifest that embeds one
// under "resolved_config".
ExperimentConfig experiment_from_json(const nlohmann::json& j);

json rate_report_to_json(const RateReport& report);
std::string rate_report_csv(const RateReport& report);

std::string atomic_law_csv(const AtomicLaw& law);

} // namespace divent::io
