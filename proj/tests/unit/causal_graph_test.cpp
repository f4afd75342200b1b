#include "confound/causal_graph.hpp"

#include <gtest/gtest.h>

#include <random>

#include "confound/dag_dsl.hpp"
#include "confound/error.hpp"
#include "oracles.hpp"

namespace confound::graph {
namespace {

CausalDag fixture(const std::string& name) { return load_dag(std::string(CONFOUND_FIXTURES) + "/" + name); }

CausalDag chain() { return parse_dag("node X\nnode Y\nnode Z\nedge X -> Y\nedge Y -> Z\n"); }
CausalDag fork() { return parse_dag("node X\nnode Y\nnode Z\nedge Y -> X\nedge Y -> Z\n"); }
CausalDag collider() { return parse_dag("node X\nnode Y\nnode Z\nedge X -> Y\nedge Z -> Y\n"); }

std::vector<std::vector<std::string>> node_lists(const std::vector<Path>& paths) {
    std::vector<std::vector<std::string>> out;
    for (const auto& p : paths) out.push_back(p.nodes);
    return out;
}

TEST(CausalDag, ObservedConfounderShape) {
    const auto g = fixture("observed_confounders.dag");
    EXPECT_EQ(g.size(), 5u);
    EXPECT_EQ(g.edges().size(), 8u);
    EXPECT_EQ(g.node("A").label, "Art movement");
}

TEST(CausalDag, RejectsCycle) {
    try {
        CausalDag("c", {{"A", "A", NodeKind::observed}, {"B", "B", NodeKind::observed}}, {{"A", "B"}, {"B", "A"}});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
    }
}

TEST(CausalDag, RejectsStructuralErrors) {
    const Node a{"A", "A", NodeKind::observed};
    EXPECT_THROW(CausalDag("d", {a, a}, {}), ValidationError);
    EXPECT_THROW(CausalDag("d", {a}, {{"A", "B"}}), ValidationError);
    EXPECT_THROW(CausalDag("d", {a}, {{"A", "A"}}), ValidationError);
    EXPECT_THROW(CausalDag("d", {{"", "", NodeKind::observed}}, {}), ValidationError);
}

TEST(CausalDag, TopologicalOrderRespectsEdges) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const auto g = oracle::random_dag(rng, 7, 0.4);
        std::vector<std::size_t> where(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) where[g.topological_order()[i]] = i;
        for (const auto& e : g.edges()) EXPECT_LT(where[g.index_of(e.from)], where[g.index_of(e.to)]);
    }
}

TEST(ClassifyTriple, ThreeShapes) {
    EXPECT_EQ(classify_triple(chain(), "X", "Y", "Z"), TripleKind::chain);
    EXPECT_EQ(classify_triple(chain(), "Z", "Y", "X"), TripleKind::chain);
    EXPECT_EQ(classify_triple(fork(), "X", "Y", "Z"), TripleKind::fork);
    EXPECT_EQ(classify_triple(collider(), "X", "Y", "Z"), TripleKind::collider);
    EXPECT_THROW(classify_triple(chain(), "X", "Z", "Y"), ValidationError);
}

TEST(DSeparation, ChainForkCollider) {
    EXPECT_TRUE(is_d_separated(chain(), {{"X"}, {"Z"}, {"Y"}}));
    EXPECT_FALSE(is_d_separated(chain(), {{"X"}, {"Z"}, {}}));
    EXPECT_TRUE(is_d_separated(fork(), {{"X"}, {"Z"}, {"Y"}}));
    EXPECT_TRUE(is_d_separated(collider(), {{"X"}, {"Z"}, {}}));
    EXPECT_FALSE(is_d_separated(collider(), {{"X"}, {"Z"}, {"Y"}}));
}

TEST(DSeparation, DirectEdgeNeverBlocked) {
    EXPECT_FALSE(is_d_separated(fixture("observed_confounders.dag"), {{"X"}, {"Z"}, {"A", "G", "M"}}));
}

TEST(DSeparation, ColliderDescendantOpensPath) {
    const auto g = parse_dag("node X\nnode Y\nnode Z\nnode W\nedge X -> Y\nedge Z -> Y\nedge Y -> W\n");
    EXPECT_TRUE(is_d_separated(g, {{"X"}, {"Z"}, {}}));
    EXPECT_FALSE(is_d_separated(g, {{"X"}, {"Z"}, {"W"}}));
}

TEST(DSeparation, RejectsBadQueries) {
    EXPECT_THROW(is_d_separated(chain(), {{"X"}, {"X"}, {}}), ValidationError);
    EXPECT_THROW(is_d_separated(chain(), {{"X"}, {"Z"}, {"X"}}), ValidationError);
    EXPECT_THROW(is_d_separated(chain(), {{"Q"}, {"Z"}, {}}), ValidationError);
}

TEST(DSeparation, MatchesPathOracleAndIsSymmetric) {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 40; ++t) {
        const auto g = oracle::random_dag(rng, 5 + t % 2, 0.45);
        const auto og = oracle::from_dag(g);
        const int n = static_cast<int>(g.size());
        for (int x = 0; x < n; ++x) {
            for (int z = x + 1; z < n; ++z) {
                for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                    if (mask & ((1u << x) | (1u << z))) continue;
                    std::set<int> given;
                    NodeSet named;
                    for (int i = 0; i < n; ++i) {
                        if (mask & (1u << i)) {
                            given.insert(i);
                            named.insert(og.ids[i]);
                        }
                    }
                    const bool got = is_d_separated(g, {{og.ids[x]}, {og.ids[z]}, named});
                    ASSERT_EQ(got, oracle::d_separated(og, {x}, {z}, given));
                    ASSERT_EQ(got, is_d_separated(g, {{og.ids[z]}, {og.ids[x]}, named}));
                }
            }
        }
    }
}

TEST(Reachability, Descendants) {
    EXPECT_EQ(descendants(fixture("observed_confounders.dag"), "A"), (NodeSet{"M", "X", "Z"}));
    EXPECT_TRUE(descendants(fixture("observed_confounders.dag"), "Z").empty());
    EXPECT_EQ(descendants(chain(), "X"), (NodeSet{"Y", "Z"}));
    EXPECT_EQ(ancestors(chain(), "Z"), (NodeSet{"X", "Y"}));
    EXPECT_THROW(descendants(chain(), "Q"), ValidationError);
}

TEST(BackdoorPaths, ObservedConfoundersGiveFive) {
    const auto paths = backdoor_paths(fixture("observed_confounders.dag"), "X", "Z");
    const std::vector<std::vector<std::string>> expected{
        {"X", "A", "M", "Z"}, {"X", "A", "Z"}, {"X", "G", "Z"}, {"X", "M", "A", "Z"}, {"X", "M", "Z"}};
    EXPECT_EQ(node_lists(paths), expected);
    EXPECT_EQ(paths[1].render(), "X <- A -> Z");
    EXPECT_EQ(paths[3].render(), "X <- M <- A -> Z");
}

TEST(BackdoorPaths, ChainAndFork) {
    EXPECT_TRUE(backdoor_paths(chain(), "X", "Z").empty());
    const auto f = backdoor_paths(fork(), "X", "Z");
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].render(), "X <- Y -> Z");
}

TEST(PathBlocking, MatchesOracleOnObservedConfounders) {
    const auto g = fixture("observed_confounders.dag");
    const auto og = oracle::from_dag(g);
    for (const auto& p : backdoor_paths(g, "X", "Z")) {
        std::vector<int> idx;
        for (const auto& id : p.nodes) idx.push_back(og.index(id));
        for (const NodeSet& given : {NodeSet{}, NodeSet{"A"}, NodeSet{"M"}, NodeSet{"A", "G", "M"}}) {
            std::set<int> gi;
            for (const auto& id : given) gi.insert(og.index(id));
            EXPECT_EQ(is_path_blocked(g, p, given), oracle::blocked(og, idx, gi)) << p.render();
        }
    }
}

TEST(Admissibility, ObservedConfounderExamples) {
    const auto g = fixture("observed_confounders.dag");
    EXPECT_TRUE(is_admissible(g, "X", "Z", {"A", "G", "M"}).admissible);

    const auto r = is_admissible(g, "X", "Z", {"G", "M"});
    EXPECT_FALSE(r.admissible);
    EXPECT_EQ(r.violated, AdmissibilityViolation::unblocked_backdoor);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(r.witness->render(), "X <- A -> Z");
}

TEST(Admissibility, DescendantViolation) {
    const auto g = parse_dag("node X\nnode Y\nnode Z\nedge X -> Y\nedge Y -> Z\nedge X -> Z\n");
    const auto r = is_admissible(g, "X", "Z", {"Y"});
    EXPECT_FALSE(r.admissible);
    EXPECT_EQ(r.violated, AdmissibilityViolation::descendant_violation);
    EXPECT_EQ(r.offending, std::vector<std::string>{"Y"});
    EXPECT_FALSE(r.witness.has_value());
}

TEST(Admissibility, RejectsLatentAndEndpoints) {
    const auto g = fixture("latent_confounder.dag");
    EXPECT_THROW(is_admissible(g, "X", "Z", {"E"}), ValidationError);
    EXPECT_THROW(is_admissible(g, "X", "Z", {"X"}), ValidationError);
    EXPECT_THROW(is_admissible(g, "X", "Z", {"Q"}), ValidationError);
}

TEST(MinimalSets, Fixtures) {
    EXPECT_EQ(minimal_adjustment_sets(fixture("observed_confounders.dag"), "X", "Z"), (std::vector<NodeSet>{{"A", "G", "M"}}));
    EXPECT_EQ(minimal_adjustment_sets(chain(), "X", "Z"), (std::vector<NodeSet>{{}}));
    EXPECT_TRUE(minimal_adjustment_sets(fixture("latent_confounder.dag"), "X", "Z").empty());
    EXPECT_TRUE(is_identifiable_via_backdoor(fixture("observed_confounders.dag"), "X", "Z"));
    EXPECT_FALSE(is_identifiable_via_backdoor(fixture("latent_confounder.dag"), "X", "Z"));
    EXPECT_TRUE(is_identifiable_via_backdoor(parse_dag("node X\nnode Z\n"), "X", "Z"));
}

TEST(MinimalSets, MatchBruteForceAndAreMinimal) {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 60; ++t) {
        const auto g = oracle::random_dag(rng, 6, 0.5, 4);
        const auto og = oracle::from_dag(g);
        for (int x = 0; x < 6; ++x) {
            for (int z = 0; z < 6; ++z) {
                if (x == z || g.is_latent(og.ids[x]) || g.is_latent(og.ids[z])) continue;
                std::vector<int> pool;
                for (int v = 0; v < 6; ++v) {
                    if (v != x && v != z && !g.is_latent(og.ids[v])) pool.push_back(v);
                }
                const auto got = minimal_adjustment_sets(g, og.ids[x], og.ids[z]);
                auto want = oracle::minimal_sets(og, x, z, pool);
                std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) {
                    return a.size() != b.size() ? a.size() < b.size() : a < b;
                });
                ASSERT_EQ(got, want);
                for (const auto& s : got) {
                    EXPECT_TRUE(is_admissible(g, og.ids[x], og.ids[z], s).admissible);
                    for (const auto& drop : s) {
                        auto smaller = s;
                        smaller.erase(drop);
                        EXPECT_FALSE(is_admissible(g, og.ids[x], og.ids[z], smaller).admissible);
                    }
                }
            }
        }
    }
}

}  // namespace
}  // namespace confound::graph
