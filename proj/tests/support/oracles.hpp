#pragma once

// Independent reference implementations used to cross-check the library.
// None of these call into the code under test beyond reading plain data
// (node ids, edges, tables, vectors); each recomputes its answer the slow,
// obvious way.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "confound/causal_graph.hpp"
#include "confound/discrete_model.hpp"
#include "confound/feature_store.hpp"

namespace oracle {

// ---------------------------------------------------------------- graphs

struct Graph {
    std::vector<std::string> ids;
    std::vector<std::pair<int, int>> edges;  // from, to

    int index(const std::string& id) const {
        return static_cast<int>(std::find(ids.begin(), ids.end(), id) - ids.begin());
    }
    bool edge(int a, int b) const {
        return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
    }
    bool adjacent(int a, int b) const { return edge(a, b) || edge(b, a); }
};

inline Graph from_dag(const confound::graph::CausalDag& dag) {
    Graph g;
    for (const auto& n : dag.nodes()) g.ids.push_back(n.id);
    for (const auto& e : dag.edges()) g.edges.emplace_back(g.index(e.from), g.index(e.to));
    return g;
}

inline std::set<int> descendants(const Graph& g, int start) {
    std::set<int> seen;
    std::vector<int> stack{start};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (const auto& [a, b] : g.edges) {
            if (a == v && seen.insert(b).second) stack.push_back(b);
        }
    }
    return seen;
}

// Every simple path between a and b, ignoring direction.
inline std::vector<std::vector<int>> simple_paths(const Graph& g, int a, int b) {
    std::vector<std::vector<int>> out;
    std::vector<int> path{a};
    std::function<void()> walk = [&] {
        const int v = path.back();
        if (v == b) {
            out.push_back(path);
            return;
        }
        for (int w = 0; w < static_cast<int>(g.ids.size()); ++w) {
            if (!g.adjacent(v, w) || std::find(path.begin(), path.end(), w) != path.end()) continue;
            path.push_back(w);
            walk();
            path.pop_back();
        }
    };
    walk();
    return out;
}

inline bool blocked(const Graph& g, const std::vector<int>& path, const std::set<int>& given) {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const int prev = path[i - 1], mid = path[i], next = path[i + 1];
        const bool collider = g.edge(prev, mid) && g.edge(next, mid);
        if (collider) {
            bool opened = given.count(mid) > 0;
            for (int d : descendants(g, mid)) opened = opened || given.count(d) > 0;
            if (!opened) return true;
        } else if (given.count(mid)) {
            return true;
        }
    }
    return false;
}

// d-separation by checking every simple path between the two sets.
inline bool d_separated(const Graph& g, const std::set<int>& x, const std::set<int>& z,
                        const std::set<int>& given) {
    for (int a : x) {
        for (int b : z) {
            for (const auto& p : simple_paths(g, a, b)) {
                if (!blocked(g, p, given)) return false;
            }
        }
    }
    return true;
}

// Same answers as d_separated, with the path lists cached per node pair so
// sweeping every conditioning subset stays cheap.
class SeparationOracle {
public:
    explicit SeparationOracle(Graph g) : g_(std::move(g)) {}

    bool separated(int x, int z, const std::set<int>& given) {
        auto& paths = paths_[{x, z}];
        if (paths.empty()) paths = simple_paths(g_, x, z);
        for (const auto& p : paths) {
            if (!blocked(g_, p, given)) return false;
        }
        return true;
    }

private:
    Graph g_;
    std::map<std::pair<int, int>, std::vector<std::vector<int>>> paths_;
};

inline bool admissible(const Graph& g, int x, int z, const std::set<int>& candidate) {
    const auto desc = descendants(g, x);
    for (int c : candidate) {
        if (desc.count(c)) return false;
    }
    for (const auto& p : simple_paths(g, x, z)) {
        if (p.size() >= 2 && g.edge(p[1], x) && !blocked(g, p, candidate)) return false;
    }
    return true;
}

// All inclusion-minimal admissible subsets of `pool`, as sorted id sets.
inline std::vector<std::set<std::string>> minimal_sets(const Graph& g, int x, int z,
                                                       const std::vector<int>& pool) {
    std::vector<std::set<int>> ok;
    const std::size_t n = pool.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::set<int> s;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) s.insert(pool[i]);
        }
        if (admissible(g, x, z, s)) ok.push_back(s);
    }
    std::vector<std::set<std::string>> out;
    for (const auto& s : ok) {
        bool minimal = true;
        for (const auto& t : ok) {
            if (t.size() < s.size() && std::includes(s.begin(), s.end(), t.begin(), t.end())) minimal = false;
        }
        if (!minimal) continue;
        std::set<std::string> named;
        for (int v : s) named.insert(g.ids[v]);
        out.push_back(named);
    }
    return out;
}

// Random DAG on n nodes; node ids are shuffled so declaration order is not a
// topological order.
inline confound::graph::CausalDag random_dag(std::mt19937_64& rng, int n, double p, int latent_every = 0) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<confound::graph::Node> nodes;
    for (int i = 0; i < n; ++i) {
        const bool latent = latent_every > 0 && i % latent_every == latent_every - 1;
        nodes.push_back({"N" + std::to_string(i), "N" + std::to_string(i),
                         latent ? confound::graph::NodeKind::latent : confound::graph::NodeKind::observed});
    }
    std::bernoulli_distribution coin(p);
    std::vector<confound::graph::Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (perm[i] < perm[j] && coin(rng)) edges.push_back({nodes[i].id, nodes[j].id});
        }
    }
    return confound::graph::CausalDag("random", nodes, edges);
}

// ---------------------------------------------------------------- models

// Random strictly positive tables; every node gets 2 or 3 categories.
inline confound::adjust::DiscreteModel random_model(std::mt19937_64& rng,
                                                    const confound::graph::CausalDag& dag) {
    confound::adjust::DiscreteModel m;
    m.dag = dag;
    std::uniform_int_distribution<int> card(2, 3);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    for (const auto& n : dag.nodes()) {
        const int k = card(rng);
        for (int c = 0; c < k; ++c) m.domains[n.id].push_back(n.id + "_" + std::to_string(c));
    }
    for (const auto& n : dag.nodes()) {
        confound::adjust::ConditionalTable t;
        t.child = n.id;
        t.parents = dag.parent_ids(n.id);
        std::vector<std::vector<std::string>> keys{{}};
        for (const auto& p : t.parents) {
            std::vector<std::vector<std::string>> next;
            for (const auto& k : keys) {
                for (const auto& v : m.domains[p]) {
                    auto e = k;
                    e.push_back(v);
                    next.push_back(e);
                }
            }
            keys = next;
        }
        for (const auto& k : keys) {
            std::vector<double> row;
            double total = 0.0;
            for (std::size_t c = 0; c < m.domains[n.id].size(); ++c) {
                row.push_back(weight(rng));
                total += row.back();
            }
            for (auto& v : row) v /= total;
            t.rows[k] = row;
        }
        m.cpts[n.id] = t;
    }
    return m;
}

// P(outcome | do(exposure = value)) by the truncated product over every
// assignment of every node.
inline std::vector<double> interventional(const confound::adjust::DiscreteModel& m, const std::string& exposure,
                                          const std::string& value, const std::string& outcome) {
    const auto& nodes = m.dag.nodes();
    std::vector<std::size_t> at(nodes.size(), 0);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < nodes.size(); ++i) pos[nodes[i].id] = i;
    const auto& out_dom = m.domains.at(outcome);
    const auto& exp_dom = m.domains.at(exposure);
    const std::size_t clamp = std::find(exp_dom.begin(), exp_dom.end(), value) - exp_dom.begin();
    std::vector<double> dist(out_dom.size(), 0.0);
    while (true) {
        if (at[pos[exposure]] == clamp) {
            double p = 1.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (nodes[i].id == exposure) continue;
                const auto& t = m.cpts.at(nodes[i].id);
                std::vector<std::string> key;
                for (const auto& par : t.parents) key.push_back(m.domains.at(par)[at[pos[par]]]);
                p *= t.rows.at(key)[at[i]];
            }
            dist[at[pos[outcome]]] += p;
        }
        std::size_t i = 0;
        while (i < nodes.size() && ++at[i] == m.domains.at(nodes[i].id).size()) at[i++] = 0;
        if (i == nodes.size()) break;
    }
    return dist;
}

// ---------------------------------------------------------------- metric

inline double dist(const std::vector<double>& u, const std::vector<double>& v, const std::string& kind) {
    if (kind == "wasserstein-1d") {
        auto a = u, b = v;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
        return a.empty() ? 0.0 : s / static_cast<double>(a.size());
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = std::abs(u[i] - v[i]);
        if (kind == "euclidean") acc += d * d;
        if (kind == "manhattan") acc += d;
        if (kind == "chebyshev") acc = std::max(acc, d);
    }
    return kind == "euclidean" ? std::sqrt(acc) : acc;
}

inline double min_distance(const std::vector<double>& q, const std::vector<confound::features::FeatureRecord>& set,
                           const std::string& kind) {
    double best = INFINITY;
    for (const auto& r : set) best = std::min(best, dist(q, r.features, kind));
    return best;
}

// The metric as a literal double loop, with sums taken in id order.
inline double naive_bias(const confound::features::Cohort& c, const std::string& kind) {
    auto by_id = [](std::vector<confound::features::FeatureRecord> v) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        return v;
    };
    const auto real = by_id(c.real), gen = by_id(c.generated);
    double num = 0.0;
    for (const auto& g : gen) num += min_distance(g.features, real, kind);
    num /= static_cast<double>(gen.size());
    double den = 0.0;
    for (const auto& [artist, peer] : c.peers) {
        double s = 0.0;
        for (const auto& a : real) s += min_distance(a.features, peer, kind);
        den += s / static_cast<double>(real.size());
    }
    den /= static_cast<double>(c.peers.size());
    return num / den;
}

inline confound::features::FeatureRecord record(std::string id, std::string artist, std::vector<double> f,
                                                bool generated = false, std::string movement = "Impressionism") {
    return {std::move(id), std::move(artist), std::move(movement), "landscape", "oil",
            generated ? confound::features::Provenance::generated : confound::features::Provenance::real,
            std::move(f)};
}

inline confound::features::Cohort random_cohort(std::mt19937_64& rng, int max_size = 20, int max_dim = 8) {
    std::uniform_int_distribution<int> size(1, max_size), dim(1, max_dim), peers(1, 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int d = dim(rng);
    auto vec = [&] {
        std::vector<double> v(d);
        for (auto& x : v) x = normal(rng);
        return v;
    };
    confound::features::Cohort c{"focal", "Impressionism", "landscape", "oil", {}, {}, {}};
    for (int i = 0, k = size(rng); i < k; ++i) c.real.push_back(record("a" + std::to_string(i), "focal", vec()));
    for (int i = 0, l = size(rng); i < l; ++i) c.generated.push_back(record("g" + std::to_string(i), "focal", vec(), true));
    for (int j = 0, jn = peers(rng); j < jn; ++j) {
        const std::string name = "peer" + std::to_string(j);
        std::vector<double> shift = vec();
        for (int i = 0, r = size(rng); i < r; ++i) {
            auto v = vec();
            for (int t = 0; t < d; ++t) v[t] += 2.0 * shift[t];
            c.peers[name].push_back(record(name + "_" + std::to_string(i), name, v));
        }
    }
    return c;
}

// ---------------------------------------------------------------- rank tests

// Doubled midranks computed by counting: 2*rank = 2*(#less) + (#equal) + 1.
inline std::vector<std::uint64_t> doubled_ranks(const std::vector<double>& v) {
    std::vector<std::uint64_t> out;
    for (double x : v) {
        std::uint64_t less = 0, equal = 0;
        for (double y : v) {
            less += y < x;
            equal += y == x;
        }
        out.push_back(2 * less + equal + 1);
    }
    return out;
}

inline double two_sided(std::uint64_t le, std::uint64_t ge, std::uint64_t total) {
    const std::uint64_t num = 2 * std::min(le, ge);
    return num >= total ? 1.0 : static_cast<double>(num) / static_cast<double>(total);
}

// Signed-rank p-value by walking all 2^n sign assignments.
inline double signed_rank_p(const std::vector<double>& diffs) {
    std::vector<double> mag;
    std::vector<bool> pos;
    for (double d : diffs) {
        if (d == 0.0) continue;
        mag.push_back(std::abs(d));
        pos.push_back(d > 0);
    }
    const auto r = doubled_ranks(mag);
    std::uint64_t observed = 0;
    for (std::size_t i = 0; i < r.size(); ++i) observed += pos[i] ? r[i] : 0;
    std::uint64_t le = 0, ge = 0;
    const std::uint64_t total = std::uint64_t{1} << r.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::uint64_t w = 0;
        for (std::size_t i = 0; i < r.size(); ++i) w += (mask >> i & 1) ? r[i] : 0;
        le += w <= observed;
        ge += w >= observed;
    }
    return two_sided(le, ge, total);
}

// Rank-sum p-value by walking every split of the pooled ranks into |a| and |b|.
inline double rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> all = a;
    all.insert(all.end(), b.begin(), b.end());
    const auto r = doubled_ranks(all);
    std::uint64_t observed = 0;
    for (std::size_t i = 0; i < a.size(); ++i) observed += r[i];
    std::uint64_t le = 0, ge = 0, total = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != a.size()) continue;
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < all.size(); ++i) s += (mask >> i & 1) ? r[i] : 0;
        ++total;
        le += s <= observed;
        ge += s >= observed;
    }
    return two_sided(le, ge, total);
}

}  // namespace oracle
