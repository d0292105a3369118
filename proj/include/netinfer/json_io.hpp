#pragma once

#include "netinfer/scores.hpp"
#include "netinfer/search.hpp"
#include "netinfer/simulate.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace netinfer {

using json = nlohmann::ordered_json;

/// {score_kind, estimator, alpha, seed, surrogates, n_effective, total, per_vertex[...], notes}.
json report_to_json(const ScoreReport& report, const std::vector<std::string>& names);

json comparison_to_json(const GraphComparison& cmp);

/// Simulator configuration document; errors name the offending field.
GdsConfig gds_config_from_json(const json& doc);
json gds_config_to_json(const GdsConfig& cfg);

}  // namespace netinfer
