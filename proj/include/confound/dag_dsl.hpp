#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "confound/causal_graph.hpp"

namespace confound::graph {

/// Parses the line-oriented DAG language:
///
///     # comment
///     dag observed_confounders
///     node X "Artist"
///     node E "Emotions" latent
///     edge A -> X
///
/// Syntax errors raise ParseError with line and column; structural problems
/// (duplicate id, unknown endpoint, self-loop) raise ParseError at the
/// offending line; cycles raise ValidationError.
CausalDag parse_dag(std::string_view text);

CausalDag load_dag(const std::filesystem::path& path);

/// Canonical text form: header, nodes in declaration order, edges in
/// declaration order. parse_dag(serialize_dag(g)) reproduces g.
std::string serialize_dag(const CausalDag& dag);

}  // namespace confound::graph
