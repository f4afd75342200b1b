#include "confound/report_json.hpp"

namespace confound::graph {

using nlohmann::json;

void to_json(json& j, const CausalDag& dag) {
    json nodes = json::array();
    for (const auto& n : dag.nodes()) {
        nodes.push_back({{"id", n.id}, {"label", n.label}, {"latent", n.kind == NodeKind::latent}});
    }
    json edges = json::array();
    for (const auto& e : dag.edges()) edges.push_back({e.from, e.to});
    json order = json::array();
    for (std::size_t i : dag.topological_order()) order.push_back(dag.node(i).id);
    j = {{"name", dag.name()}, {"nodes", nodes}, {"edges", edges}, {"topological_order", order}};
}

void to_json(json& j, const Path& path) {
    json triples = json::array();
    for (auto t : path.triples) triples.push_back(std::string(to_string(t)));
    j = {{"nodes", path.nodes}, {"rendered", path.render()}, {"triples", triples}};
}

void to_json(json& j, const AdjustmentResult& result) {
    j = {{"admissible", result.admissible}, {"violated", std::string(to_string(result.violated))}};
    if (result.witness) j["witness"] = *result.witness;
    if (!result.offending.empty()) j["offending"] = result.offending;
}

}  // namespace confound::graph

namespace confound::adjust {

void to_json(nlohmann::json& j, const CausalEffectReport& r) {
    nlohmann::json dist = nlohmann::json::object();
    for (std::size_t i = 0; i < r.outcome_domain.size(); ++i) dist[r.outcome_domain[i]] = r.distribution[i];
    j = {{"exposure", r.exposure},
         {"exposure_value", r.exposure_value},
         {"outcome", r.outcome},
         {"adjustment", r.adjustment},
         {"distribution", dist},
         {"strata", r.strata},
         {"skipped_strata", r.skipped_strata},
         {"skipped_mass", r.skipped_mass}};
}

}  // namespace confound::adjust

namespace confound::features {

void to_json(nlohmann::json& j, const DatasetSummary& s) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& [key, count] : s.counts) {
        groups.push_back({{"artist", key.artist},
                          {"movement", key.movement},
                          {"genre", key.genre},
                          {"material", key.material},
                          {"provenance", std::string(to_string(key.provenance))},
                          {"count", count}});
    }
    j = {{"dimension", s.dimension}, {"record_count", s.record_count}, {"groups", groups}};
}

void to_json(nlohmann::json& j, const CohortInsufficiency& r) {
    j = {{"focal_artist", r.focal_artist},
         {"movement", r.movement},
         {"genre", r.genre},
         {"material", r.material},
         {"real_count", r.real_count},
         {"generated_count", r.generated_count},
         {"peer_counts", r.peer_counts},
         {"min_peer_count", r.rules.min_peer_count},
         {"strict", r.rules.strict},
         {"reasons", r.reasons}};
}

}  // namespace confound::features

namespace confound::matching {

void to_json(nlohmann::json& j, const MatchPair& p) {
    j = {{"query", p.query_id}, {"match", p.match_id}, {"distance", p.distance}};
}

void to_json(nlohmann::json& j, const BiasReport& r) {
    j = {{"focal_artist", r.focal_artist},
         {"movement", r.movement},
         {"genre", r.genre},
         {"material", r.material},
         {"distance", std::string(to_string(r.kind))},
         {"real_count", r.real_count},
         {"generated_count", r.generated_count},
         {"peer_sizes", r.peer_sizes},
         {"numerator", r.numerator},
         {"denominator", r.denominator},
         {"bias", r.bias},
         {"exceeds_one", r.exceeds_one},
         {"peer_means", r.peer_means},
         {"match_multiplicity", r.match_multiplicity},
         {"generated_matches", r.generated_matches},
         {"peer_matches", r.peer_matches}};
}

void to_json(nlohmann::json& j, const SimpsonReport& r) {
    nlohmann::json strata = nlohmann::json::object();
    for (const auto& [m, report] : r.stratified) strata[m] = report;
    j = {{"movements", r.movements},
         {"stratified", strata},
         {"pooled", r.pooled},
         {"attenuated", r.attenuated}};
}

}  // namespace confound::matching

namespace confound::stats {

void to_json(nlohmann::json& j, const RankTestResult& r) {
    j = {{"test", std::string(to_string(r.test))},
         {"method", std::string(to_string(r.method))},
         {"n_effective", r.n_effective},
         {"n_a", r.n_a},
         {"n_b", r.n_b},
         {"statistic", r.statistic},
         {"p_value", r.p_value},
         {"alpha", r.alpha},
         {"reject", r.reject}};
    if (r.test == TestKind::signed_rank) {
        j["zero_differences"] = r.zero_differences;
        j["w_plus"] = r.rank_plus;
        j["w_minus"] = r.rank_minus;
    } else {
        j["u_a"] = r.rank_plus;
        j["u_b"] = r.rank_minus;
    }
}

void to_json(nlohmann::json& j, const GroupComparison& c) {
    j = {{"mode", std::string(to_string(c.mode))},
         {"n_single", c.n_single},
         {"n_multi", c.n_multi},
         {"mean_single", c.mean_single},
         {"mean_multi", c.mean_multi},
         {"test", c.test}};
}

}  // namespace confound::stats

namespace confound::synth {

void to_json(nlohmann::json& j, const ScenarioScore& s) {
    j = {{"artist", s.artist},
         {"movement", s.movement},
         {"genre", s.genre},
         {"multi_movement", s.multi_movement},
         {"numerator", s.numerator},
         {"denominator", s.denominator},
         {"bias", s.bias}};
}

void to_json(nlohmann::json& j, const ScenarioReport& r) {
    j = {{"preset", r.preset},
         {"seed", r.seed},
         {"mode", std::string(to_string(r.mode))},
         {"distance", std::string(matching::to_string(r.kind))},
         {"record_count", r.record_count},
         {"scores", r.scores},
         {"artist_means", r.artist_means},
         {"ordering", r.ordering}};
    j["comparison"] = r.comparison ? nlohmann::json(*r.comparison) : nlohmann::json(nullptr);
}

}  // namespace confound::synth
