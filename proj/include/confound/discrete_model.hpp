#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "confound/causal_graph.hpp"

namespace confound::adjust {

/// P(child | parents). Rows are keyed by parent values in `parents` order and
/// hold one probability per category of the child's domain.
struct ConditionalTable {
    std::string child;
    std::vector<std::string> parents;
    std::map<std::vector<std::string>, std::vector<double>> rows;
};

/// Categorical model: a DAG plus a domain and a conditional table per node.
/// Plain data; run validate_model before computing with it.
struct DiscreteModel {
    graph::CausalDag dag;
    std::map<std::string, std::vector<std::string>> domains;
    std::map<std::string, ConditionalTable> cpts;
};

inline constexpr double kRowSumTolerance = 1e-9;

struct ModelViolation {
    std::string node;
    std::string message;
};

/// Every broken model invariant, in node order. Empty means the model is valid.
std::vector<ModelViolation> validate_model(const DiscreteModel& model);

/// Throws ValidationError naming every violation.
void require_valid(const DiscreteModel& model);

/// Parses the model text format against an already-loaded DAG:
///
///     domains:
///       A: a0, a1
///       X: x0, x1
///     cpt A
///       () : 0.5, 0.5
///     cpt X | A
///       (a0) : 0.8, 0.2
///       (a1) : 0.3, 0.7
///
/// Only syntax is checked here (ParseError); semantic checks live in
/// validate_model.
DiscreteModel parse_model(std::string_view text, graph::CausalDag dag);

DiscreteModel load_model(const std::filesystem::path& path, graph::CausalDag dag);

}  // namespace confound::adjust
