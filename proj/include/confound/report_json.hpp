#pragma once

#include <nlohmann/json.hpp>

#include "confound/adjustment.hpp"
#include "confound/causal_graph.hpp"
#include "confound/feature_store.hpp"
#include "confound/matching_bias.hpp"
#include "confound/stats.hpp"
#include "confound/synth.hpp"

// JSON shapes of every report the command line emits. Keys are stable; maps
// serialize in key order, so output is byte-stable for fixed input.

namespace confound::graph {
void to_json(nlohmann::json& j, const CausalDag& dag);
void to_json(nlohmann::json& j, const Path& path);
void to_json(nlohmann::json& j, const AdjustmentResult& result);
}  // namespace confound::graph

namespace confound::adjust {
void to_json(nlohmann::json& j, const CausalEffectReport& report);
}

namespace confound::features {
void to_json(nlohmann::json& j, const DatasetSummary& summary);
void to_json(nlohmann::json& j, const CohortInsufficiency& report);
}  // namespace confound::features

namespace confound::matching {
void to_json(nlohmann::json& j, const MatchPair& pair);
void to_json(nlohmann::json& j, const BiasReport& report);
void to_json(nlohmann::json& j, const SimpsonReport& report);
}  // namespace confound::matching

namespace confound::stats {
void to_json(nlohmann::json& j, const RankTestResult& result);
void to_json(nlohmann::json& j, const GroupComparison& comparison);
}  // namespace confound::stats

namespace confound::synth {
void to_json(nlohmann::json& j, const ScenarioScore& score);
void to_json(nlohmann::json& j, const ScenarioReport& report);
}  // namespace confound::synth
