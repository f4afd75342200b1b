#include "confound/causal_graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "confound/error.hpp"

namespace confound::graph {

namespace {

// Finds one directed cycle among nodes left over by Kahn's algorithm.
std::vector<std::size_t> find_cycle(const std::vector<std::vector<std::size_t>>& children,
                                    const std::vector<std::size_t>& indegree) {
    const std::size_t n = children.size();
    enum class Mark { fresh, active, done };
    std::vector<Mark> mark(n, Mark::fresh);
    std::vector<std::size_t> stack;
    std::vector<std::size_t> cycle;

    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
        mark[v] = Mark::active;
        stack.push_back(v);
        for (std::size_t c : children[v]) {
            if (mark[c] == Mark::active) {
                auto it = std::find(stack.begin(), stack.end(), c);
                cycle.assign(it, stack.end());
                cycle.push_back(c);
                return true;
            }
            if (mark[c] == Mark::fresh && visit(c)) return true;
        }
        stack.pop_back();
        mark[v] = Mark::done;
        return false;
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (indegree[v] > 0 && mark[v] == Mark::fresh && visit(v)) break;
    }
    return cycle;
}

void check_known(const CausalDag& dag, const NodeSet& ids) {
    for (const auto& id : ids) (void)dag.index_of(id);
}

// Reachable-set traversal: marks every node with an active trail from
// `sources` given `given`. When `cut` is set, edges leaving that node are
// ignored, which restricts trails from it to those entering it.
std::vector<bool> active_reach(const CausalDag& dag, const std::vector<std::size_t>& sources,
                               const std::vector<bool>& given,
                               std::optional<std::size_t> cut = std::nullopt) {
    const std::size_t n = dag.size();
    auto parents_of = [&](std::size_t v) {
        std::vector<std::size_t> out;
        for (std::size_t p : dag.parents(v)) {
            if (!cut || p != *cut) out.push_back(p);
        }
        return out;
    };
    auto children_of = [&](std::size_t v) {
        if (cut && v == *cut) return std::vector<std::size_t>{};
        return dag.children(v);
    };

    // Nodes that are conditioned on or have a conditioned descendant.
    std::vector<bool> opens_collider(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < n; ++v) {
        if (given[v]) {
            opens_collider[v] = true;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t p : parents_of(v)) {
            if (!opens_collider[p]) {
                opens_collider[p] = true;
                queue.push_back(p);
            }
        }
    }

    // Visit states: (node, arrived from a child = up / from a parent = down).
    std::vector<bool> seen_up(n, false), seen_down(n, false), reached(n, false);
    std::deque<std::pair<std::size_t, bool>> work;
    for (std::size_t s : sources) work.emplace_back(s, true);
    while (!work.empty()) {
        auto [v, up] = work.front();
        work.pop_front();
        auto& seen = up ? seen_up : seen_down;
        if (seen[v]) continue;
        seen[v] = true;
        if (!given[v]) reached[v] = true;

        if (up) {
            if (given[v]) continue;
            for (std::size_t p : parents_of(v)) work.emplace_back(p, true);
            for (std::size_t c : children_of(v)) work.emplace_back(c, false);
        } else {
            if (!given[v]) {
                for (std::size_t c : children_of(v)) work.emplace_back(c, false);
            }
            if (opens_collider[v]) {
                for (std::size_t p : parents_of(v)) work.emplace_back(p, true);
            }
        }
    }
    return reached;
}

std::vector<bool> to_mask(const CausalDag& dag, const NodeSet& ids) {
    std::vector<bool> mask(dag.size(), false);
    for (const auto& id : ids) mask[dag.index_of(id)] = true;
    return mask;
}

// Condition (b) only, assuming condition (a) already holds: the exposure is
// d-separated from the outcome once the exposure's outgoing edges are cut.
bool blocks_all_backdoors(const CausalDag& dag, std::size_t exposure, std::size_t outcome,
                          const std::vector<bool>& given) {
    auto reached = active_reach(dag, {exposure}, given, exposure);
    return !reached[outcome];
}

void check_exposure_outcome(const CausalDag& dag, std::string_view exposure,
                            std::string_view outcome) {
    (void)dag.index_of(exposure);
    (void)dag.index_of(outcome);
    if (exposure == outcome) {
        throw ValidationError("exposure and outcome must differ: '" + std::string(exposure) + "'");
    }
}

}  // namespace

CausalDag::CausalDag(std::string name, std::vector<Node> nodes, std::vector<Edge> edges)
    : name_(std::move(name)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
    const std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = nodes_[i].id;
        if (id.empty()) throw ValidationError("node id must be nonempty");
        if (!index_.emplace(id, i).second) {
            throw ValidationError("duplicate node id '" + id + "'");
        }
    }
    parents_.assign(n, {});
    children_.assign(n, {});
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges_) {
        auto from = index_.find(e.from);
        auto to = index_.find(e.to);
        if (from == index_.end()) throw ValidationError("edge references unknown node '" + e.from + "'");
        if (to == index_.end()) throw ValidationError("edge references unknown node '" + e.to + "'");
        if (from->second == to->second) throw ValidationError("self-loop on node '" + e.from + "'");
        if (!seen.emplace(from->second, to->second).second) {
            throw ValidationError("duplicate edge " + e.from + " -> " + e.to);
        }
        children_[from->second].push_back(to->second);
        parents_[to->second].push_back(from->second);
    }
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());

    std::vector<std::size_t> indegree(n);
    for (std::size_t i = 0; i < n; ++i) indegree[i] = parents_[i].size();
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.insert(i);
    }
    while (!ready.empty()) {
        std::size_t v = *ready.begin();
        ready.erase(ready.begin());
        topo_.push_back(v);
        for (std::size_t c : children_[v]) {
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    if (topo_.size() != n) {
        std::string msg = "cycle detected:";
        auto cycle = find_cycle(children_, indegree);
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            msg += (i == 0 ? " " : " -> ") + nodes_[cycle[i]].id;
        }
        throw ValidationError(msg);
    }
}

bool CausalDag::contains(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
}

std::size_t CausalDag::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw ValidationError("unknown node '" + std::string(id) + "'");
    return it->second;
}

bool CausalDag::has_edge(std::size_t from, std::size_t to) const {
    const auto& c = children_[from];
    return std::binary_search(c.begin(), c.end(), to);
}

std::vector<std::string> CausalDag::parent_ids(std::string_view id) const {
    std::vector<std::string> out;
    for (std::size_t p : parents_[index_of(id)]) out.push_back(nodes_[p].id);
    std::sort(out.begin(), out.end());
    return out;
}

std::string_view to_string(TripleKind kind) {
    switch (kind) {
        case TripleKind::chain: return "chain";
        case TripleKind::fork: return "fork";
        case TripleKind::collider: return "collider";
    }
    return "?";
}

std::string_view to_string(AdmissibilityViolation violation) {
    switch (violation) {
        case AdmissibilityViolation::none: return "none";
        case AdmissibilityViolation::descendant_violation: return "descendant-violation";
        case AdmissibilityViolation::unblocked_backdoor: return "unblocked-backdoor";
    }
    return "?";
}

std::string Path::render() const {
    std::string out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) out += forward[i - 1] ? " -> " : " <- ";
        out += nodes[i];
    }
    return out;
}

TripleKind classify_triple(const CausalDag& dag, std::string_view a, std::string_view b,
                           std::string_view c) {
    const std::size_t ia = dag.index_of(a), ib = dag.index_of(b), ic = dag.index_of(c);
    if (!dag.adjacent(ia, ib) || !dag.adjacent(ib, ic)) {
        throw ValidationError("non-adjacent triple " + std::string(a) + ", " + std::string(b) +
                              ", " + std::string(c));
    }
    const bool into_from_a = dag.has_edge(ia, ib);
    const bool into_from_c = dag.has_edge(ic, ib);
    if (into_from_a && into_from_c) return TripleKind::collider;
    if (!into_from_a && !into_from_c) return TripleKind::fork;
    return TripleKind::chain;
}

Path make_path(const CausalDag& dag, const std::vector<std::string>& nodes) {
    Path path;
    path.nodes = nodes;
    NodeSet seen;
    for (const auto& id : nodes) {
        (void)dag.index_of(id);
        if (!seen.insert(id).second) throw ValidationError("path repeats node '" + id + "'");
    }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const std::size_t a = dag.index_of(nodes[i]), b = dag.index_of(nodes[i + 1]);
        if (!dag.adjacent(a, b)) {
            throw ValidationError("path step " + nodes[i] + " - " + nodes[i + 1] + " is not an edge");
        }
        path.forward.push_back(dag.has_edge(a, b));
    }
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        path.triples.push_back(classify_triple(dag, nodes[i - 1], nodes[i], nodes[i + 1]));
    }
    return path;
}

bool is_d_separated(const CausalDag& dag, const SeparationQuery& query) {
    check_known(dag, query.x);
    check_known(dag, query.z);
    check_known(dag, query.given);
    auto overlap = [](const NodeSet& a, const NodeSet& b) {
        return std::any_of(a.begin(), a.end(), [&](const auto& id) { return b.count(id) > 0; });
    };
    if (overlap(query.x, query.z) || overlap(query.x, query.given) ||
        overlap(query.z, query.given)) {
        throw ValidationError("separation query sets must be pairwise disjoint");
    }

    std::vector<std::size_t> sources;
    for (const auto& id : query.x) sources.push_back(dag.index_of(id));
    const auto reached = active_reach(dag, sources, to_mask(dag, query.given));
    return std::none_of(query.z.begin(), query.z.end(),
                        [&](const auto& id) { return reached[dag.index_of(id)]; });
}

NodeSet descendants(const CausalDag& dag, std::string_view id) {
    const std::size_t start = dag.index_of(id);
    std::vector<bool> seen(dag.size(), false);
    std::deque<std::size_t> queue{start};
    NodeSet out;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t c : dag.children(v)) {
            if (!seen[c]) {
                seen[c] = true;
                out.insert(dag.node(c).id);
                queue.push_back(c);
            }
        }
    }
    return out;
}

NodeSet ancestors(const CausalDag& dag, std::string_view id) {
    const std::size_t start = dag.index_of(id);
    std::vector<bool> seen(dag.size(), false);
    std::deque<std::size_t> queue{start};
    NodeSet out;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t p : dag.parents(v)) {
            if (!seen[p]) {
                seen[p] = true;
                out.insert(dag.node(p).id);
                queue.push_back(p);
            }
        }
    }
    return out;
}

bool is_path_blocked(const CausalDag& dag, const Path& path, const NodeSet& given) {
    for (std::size_t i = 0; i < path.triples.size(); ++i) {
        const auto& mid = path.nodes[i + 1];
        if (path.triples[i] == TripleKind::collider) {
            if (given.count(mid)) continue;
            const auto below = descendants(dag, mid);
            const bool opened = std::any_of(below.begin(), below.end(),
                                            [&](const auto& d) { return given.count(d) > 0; });
            if (!opened) return true;
        } else if (given.count(mid)) {
            return true;
        }
    }
    return false;
}

std::vector<Path> backdoor_paths(const CausalDag& dag, std::string_view exposure,
                                 std::string_view outcome) {
    check_exposure_outcome(dag, exposure, outcome);
    const std::size_t source = dag.index_of(exposure);
    const std::size_t target = dag.index_of(outcome);

    std::vector<std::vector<std::string>> found;
    std::vector<bool> on_path(dag.size(), false);
    std::vector<std::size_t> trail{source};
    on_path[source] = true;

    std::function<void(std::size_t)> extend = [&](std::size_t v) {
        if (v == target) {
            std::vector<std::string> ids;
            for (std::size_t t : trail) ids.push_back(dag.node(t).id);
            found.push_back(std::move(ids));
            return;
        }
        std::vector<std::size_t> next(dag.parents(v));
        if (v != source) next.insert(next.end(), dag.children(v).begin(), dag.children(v).end());
        for (std::size_t w : next) {
            if (on_path[w]) continue;
            on_path[w] = true;
            trail.push_back(w);
            extend(w);
            trail.pop_back();
            on_path[w] = false;
        }
    };
    extend(source);

    std::sort(found.begin(), found.end());
    std::vector<Path> paths;
    paths.reserve(found.size());
    for (const auto& ids : found) paths.push_back(make_path(dag, ids));
    return paths;
}

AdjustmentResult is_admissible(const CausalDag& dag, std::string_view exposure,
                               std::string_view outcome, const NodeSet& candidate) {
    check_exposure_outcome(dag, exposure, outcome);
    for (const auto& id : candidate) {
        if (dag.is_latent(id)) {
            throw ValidationError("latent node '" + id + "' cannot be adjusted for");
        }
        if (id == exposure || id == outcome) {
            throw ValidationError("adjustment set must not contain the exposure or outcome ('" +
                                  id + "')");
        }
    }

    AdjustmentResult result;
    const auto below = descendants(dag, exposure);
    for (const auto& id : candidate) {
        if (below.count(id)) result.offending.push_back(id);
    }
    if (!result.offending.empty()) {
        result.violated = AdmissibilityViolation::descendant_violation;
        return result;
    }

    if (blocks_all_backdoors(dag, dag.index_of(exposure), dag.index_of(outcome),
                             to_mask(dag, candidate))) {
        result.admissible = true;
        return result;
    }
    result.violated = AdmissibilityViolation::unblocked_backdoor;
    for (auto& path : backdoor_paths(dag, exposure, outcome)) {
        if (!is_path_blocked(dag, path, candidate)) {
            result.witness = std::move(path);
            break;
        }
    }
    return result;
}

std::vector<NodeSet> minimal_adjustment_sets(const CausalDag& dag, std::string_view exposure,
                                             std::string_view outcome) {
    check_exposure_outcome(dag, exposure, outcome);
    const std::size_t source = dag.index_of(exposure);
    const std::size_t target = dag.index_of(outcome);
    const auto below = descendants(dag, exposure);

    // Observed non-descendants, sorted by id so combinations come out in
    // lexicographic order.
    std::vector<std::string> pool;
    for (const auto& node : dag.nodes()) {
        if (node.kind == NodeKind::latent || node.id == exposure || node.id == outcome) continue;
        if (below.count(node.id)) continue;
        pool.push_back(node.id);
    }
    std::sort(pool.begin(), pool.end());

    std::vector<NodeSet> minimal;
    const std::size_t n = pool.size();
    std::vector<std::size_t> pick;
    for (std::size_t k = 0; k <= n; ++k) {
        pick.resize(k);
        for (std::size_t i = 0; i < k; ++i) pick[i] = i;
        while (true) {
            NodeSet subset;
            for (std::size_t i : pick) subset.insert(pool[i]);
            // Any admissible set with an admissible proper subset contains one
            // of the smaller minimal sets already found.
            const bool dominated =
                std::any_of(minimal.begin(), minimal.end(), [&](const NodeSet& m) {
                    return std::includes(subset.begin(), subset.end(), m.begin(), m.end());
                });
            if (!dominated && blocks_all_backdoors(dag, source, target, to_mask(dag, subset))) {
                minimal.push_back(std::move(subset));
            }

            std::size_t i = k;
            while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return minimal;
}

bool is_identifiable_via_backdoor(const CausalDag& dag, std::string_view exposure,
                                  std::string_view outcome) {
    return !minimal_adjustment_sets(dag, exposure, outcome).empty();
}

}  // namespace confound::graph
