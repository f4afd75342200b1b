#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace confound::graph {

enum class NodeKind { observed, latent };

struct Node {
    std::string id;
    std::string label;
    NodeKind kind = NodeKind::observed;
};

struct Edge {
    std::string from;
    std::string to;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

using NodeSet = std::set<std::string>;

/// Immutable directed acyclic graph over named nodes.
///
/// Construction validates every structural invariant (unique nonempty ids,
/// declared endpoints, no self-loops or duplicate edges, acyclicity) and
/// throws ValidationError on the first violation. Node indices follow
/// declaration order.
class CausalDag {
public:
    CausalDag() = default;
    CausalDag(std::string name, std::vector<Node> nodes, std::vector<Edge> edges);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    bool contains(std::string_view id) const;
    /// Throws ValidationError for an undeclared id.
    std::size_t index_of(std::string_view id) const;
    const Node& node(std::string_view id) const { return nodes_[index_of(id)]; }
    const Node& node(std::size_t index) const { return nodes_[index]; }
    bool is_latent(std::string_view id) const { return node(id).kind == NodeKind::latent; }

    const std::vector<std::size_t>& parents(std::size_t index) const { return parents_[index]; }
    const std::vector<std::size_t>& children(std::size_t index) const { return children_[index]; }
    bool has_edge(std::size_t from, std::size_t to) const;
    bool adjacent(std::size_t a, std::size_t b) const { return has_edge(a, b) || has_edge(b, a); }

    /// Parent ids of `id`, sorted.
    std::vector<std::string> parent_ids(std::string_view id) const;
    /// A topological order (Kahn's algorithm, ties by declaration order).
    const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

private:
    std::string name_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> topo_;
};

enum class TripleKind { chain, fork, collider };

std::string_view to_string(TripleKind kind);

/// A simple path that ignores edge direction. `forward[i]` records whether the
/// edge between nodes[i] and nodes[i+1] points from the former to the latter;
/// `triples[i]` classifies interior node nodes[i+1].
struct Path {
    std::vector<std::string> nodes;
    std::vector<bool> forward;
    std::vector<TripleKind> triples;

    /// Renders e.g. "X <- A -> Z".
    std::string render() const;

    friend bool operator==(const Path& a, const Path& b) { return a.nodes == b.nodes; }
};

/// Builds a Path from a node sequence; throws ValidationError if two
/// consecutive nodes are not adjacent or a node repeats.
Path make_path(const CausalDag& dag, const std::vector<std::string>& nodes);

struct SeparationQuery {
    NodeSet x;
    NodeSet z;
    NodeSet given;
};

enum class AdmissibilityViolation { none, descendant_violation, unblocked_backdoor };

std::string_view to_string(AdmissibilityViolation violation);

struct AdjustmentResult {
    bool admissible = false;
    AdmissibilityViolation violated = AdmissibilityViolation::none;
    /// Present iff violated == unblocked_backdoor.
    std::optional<Path> witness;
    /// Candidate members that descend from the exposure (descendant_violation).
    std::vector<std::string> offending;
};

/// Throws ValidationError when a-b or b-c are not adjacent.
TripleKind classify_triple(const CausalDag& dag, std::string_view a, std::string_view b,
                           std::string_view c);

/// Standard d-separation via the reachable-set (Bayes ball) traversal.
/// Throws ValidationError for unknown ids or overlapping sets.
bool is_d_separated(const CausalDag& dag, const SeparationQuery& query);

/// Every node reachable from `id` along directed edges, excluding `id`.
NodeSet descendants(const CausalDag& dag, std::string_view id);
NodeSet ancestors(const CausalDag& dag, std::string_view id);

/// True when `path` is blocked by `given`: some interior chain or fork node is
/// conditioned on, or some collider has neither itself nor a descendant in it.
bool is_path_blocked(const CausalDag& dag, const Path& path, const NodeSet& given);

/// All simple paths from exposure to outcome whose first edge points into the
/// exposure, sorted lexicographically by node sequence.
std::vector<Path> backdoor_paths(const CausalDag& dag, std::string_view exposure,
                                 std::string_view outcome);

/// Two-condition backdoor admissibility. Throws ValidationError when the
/// candidate holds a latent node, the exposure or outcome, or unknown ids.
AdjustmentResult is_admissible(const CausalDag& dag, std::string_view exposure,
                               std::string_view outcome, const NodeSet& candidate);

/// Inclusion-minimal admissible sets over observed nodes, ordered by size then
/// lexicographically. Empty when the effect is not identifiable by adjustment.
std::vector<NodeSet> minimal_adjustment_sets(const CausalDag& dag, std::string_view exposure,
                                             std::string_view outcome);

bool is_identifiable_via_backdoor(const CausalDag& dag, std::string_view exposure,
                                  std::string_view outcome);

}  // namespace confound::graph
