#include "confound/adjustment.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "confound/dag_dsl.hpp"
#include "confound/error.hpp"
#include "oracles.hpp"

namespace confound::adjust {
namespace {

using graph::NodeSet;

std::string fixture_path(const std::string& name) { return std::string(CONFOUND_FIXTURES) + "/" + name; }

DiscreteModel observed() { return load_model(fixture_path("observed_confounders.model"), graph::load_dag(fixture_path("observed_confounders.dag"))); }
DiscreteModel latent() { return load_model(fixture_path("latent_confounder.model"), graph::load_dag(fixture_path("latent_confounder.dag"))); }

// C -> X, C -> Z, X -> Z with hand-picked tables. Under do(X = x1),
// P(Z = z1) = 0.5 * 0.4 + 0.5 * 0.8 = 0.6. Observationally
// P(C = c0 | x1) = 0.1 / 0.5 = 0.2, so P(Z = z1 | x1) = 0.2 * 0.4 + 0.8 * 0.8 = 0.72.
DiscreteModel confounded(double p_x1_given_c0 = 0.2) {
    const auto dag = graph::parse_dag("node C\nnode X\nnode Z\nedge C -> X\nedge C -> Z\nedge X -> Z\n");
    const std::string a = std::to_string(1.0 - p_x1_given_c0), b = std::to_string(p_x1_given_c0);
    return parse_model("domains:\n C: c0, c1\n X: x0, x1\n Z: z0, z1\n"
                       "cpt C\n () : 0.5, 0.5\n"
                       "cpt X | C\n (c0) : " + a + ", " + b + "\n (c1) : 0.2, 0.8\n"
                       "cpt Z | C, X\n (c0, x0) : 0.9, 0.1\n (c0, x1) : 0.6, 0.4\n"
                       " (c1, x0) : 0.5, 0.5\n (c1, x1) : 0.2, 0.8\n",
                       dag);
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(ValidateModel, ObservedConfoundersIsValid) { EXPECT_TRUE(validate_model(observed()).empty()); }

TEST(ValidateModel, ReportsRowSum) {
    auto m = observed();
    m.cpts["M"].rows[{"a1"}] = {0.5, 0.4};
    const auto v = validate_model(m);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].node, "M");
    EXPECT_NE(v[0].message.find("(a1)"), std::string::npos);
    EXPECT_NE(v[0].message.find("sums to"), std::string::npos);
    EXPECT_THROW(require_valid(m), ValidationError);
}

TEST(ValidateModel, ReportsMissingTableRowAndDomain) {
    auto m = observed();
    m.cpts.erase("G");
    m.cpts["X"].rows.erase({"a0", "g1", "m0"});
    m.domains["Z"] = {};
    const auto v = validate_model(m);
    std::set<std::string> nodes;
    for (const auto& x : v) nodes.insert(x.node);
    EXPECT_EQ(nodes, (std::set<std::string>{"G", "X", "Z"}));
}

TEST(ValidateModel, ReportsParentMismatchAndBadEntries) {
    auto m = observed();
    m.cpts["M"].parents = {"G"};
    m.cpts["A"].rows[{}] = {1.2, -0.2};
    EXPECT_EQ(validate_model(m).size(), 2u);
}

TEST(ParseModel, SyntaxErrorsHaveLines) {
    const auto dag = graph::parse_dag("node A\n");
    try {
        parse_model("domains:\n A: a0, a1\ncpt A\n () 0.5, 0.5\n", dag);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
    EXPECT_THROW(parse_model("cpt A\n () : 0.5, x\n", dag), ParseError);
    EXPECT_THROW(parse_model("A: a0\n", dag), ParseError);
}

TEST(BackdoorAdjust, ConfoundedHandValues) {
    const auto m = confounded();
    const auto r = backdoor_adjust(m, "X", "x1", "Z", {"C"});
    EXPECT_NEAR(r.distribution[1], 0.6, 1e-12);
    EXPECT_NEAR(intervention_oracle(m, "X", "x1", "Z")[1], 0.6, 1e-12);
    EXPECT_NEAR(observational_conditional(m, "X", "x1", "Z")[1], 0.72, 1e-12);
    EXPECT_NEAR(oracle::interventional(m, "X", "x1", "Z")[1], 0.6, 1e-12);
    EXPECT_EQ(r.strata, 2u);
}

TEST(BackdoorAdjust, ChainEqualsObservational) {
    const auto dag = graph::parse_dag("node X\nnode Y\nnode Z\nedge X -> Y\nedge Y -> Z\n");
    std::mt19937_64 rng(3);
    const auto m = oracle::random_model(rng, dag);
    const auto r = backdoor_adjust(m, "X", m.domains.at("X")[1], "Z", {});
    const auto obs = observational_conditional(m, "X", m.domains.at("X")[1], "Z");
    const auto truth = intervention_oracle(m, "X", m.domains.at("X")[1], "Z");
    for (std::size_t i = 0; i < obs.size(); ++i) {
        EXPECT_NEAR(r.distribution[i], obs[i], 1e-12);
        EXPECT_NEAR(truth[i], obs[i], 1e-12);
    }
}

TEST(BackdoorAdjust, ObservedConfoundersMatchOracle) {
    const auto m = observed();
    for (const auto& x : {"x0", "x1"}) {
        const auto r = backdoor_adjust(m, "X", x, "Z", {"A", "G", "M"});
        const auto truth = oracle::interventional(m, "X", x, "Z");
        const auto lib = intervention_oracle(m, "X", x, "Z");
        for (std::size_t i = 0; i < truth.size(); ++i) {
            EXPECT_NEAR(r.distribution[i], truth[i], 1e-12);
            EXPECT_NEAR(lib[i], truth[i], 1e-12);
        }
        EXPECT_NEAR(total(r.distribution), 1.0, 1e-9);
    }
}

TEST(BackdoorAdjust, RefusesInadmissibleSets) {
    try {
        backdoor_adjust(observed(), "X", "x1", "Z", {"G", "M"});
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("X <- A -> Z"), std::string::npos);
    }
    const auto m = latent();
    EXPECT_THROW(backdoor_adjust(m, "X", "x1", "Z", {"A", "G", "M"}), DomainError);
    // The oracle sees the latent table and still answers.
    EXPECT_NEAR(total(intervention_oracle(m, "X", "x1", "Z")), 1.0, 1e-12);
}

TEST(BackdoorAdjust, UnknownCategory) {
    EXPECT_THROW(backdoor_adjust(observed(), "X", "x7", "Z", {"A", "G", "M"}), ValidationError);
}

TEST(BackdoorAdjust, ZeroProbabilityStratumIsSkipped) {
    // X never takes x1 when C = c0, so that stratum carries no information.
    const auto m = confounded(0.0);
    const auto r = backdoor_adjust(m, "X", "x1", "Z", {"C"});
    EXPECT_EQ(r.skipped_strata, 1u);
    EXPECT_DOUBLE_EQ(r.skipped_mass, 0.5);
    EXPECT_NEAR(r.distribution[1], 0.8, 1e-12);
    EXPECT_NEAR(total(r.distribution), 1.0, 1e-12);
}

TEST(BackdoorAdjust, SupersetsAgree) {
    // The observed-confounder graph plus a root W that only feeds Z: {A,G,M} and {A,G,M,W} are both admissible.
    const auto m = observed();
    auto dag = graph::parse_dag(graph::serialize_dag(m.dag) + "node W\nedge W -> Z\n");
    auto ext = m;
    ext.dag = dag;
    ext.domains["W"] = {"w0", "w1", "w2"};
    ext.cpts["W"] = {"W", {}, {{{}, {0.2, 0.3, 0.5}}}};
    auto& z = ext.cpts["Z"];
    z.parents = {"A", "G", "M", "W", "X"};
    std::map<std::vector<std::string>, std::vector<double>> rows;
    for (const auto& [key, probs] : m.cpts.at("Z").rows) {
        for (int w = 0; w < 3; ++w) {
            auto k = key;
            k.insert(k.begin() + 3, "w" + std::to_string(w));
            const double shift = 0.05 * w;
            rows[k] = {probs[0] - shift * probs[0], probs[1] + shift * probs[0]};
        }
    }
    z.rows = rows;
    ASSERT_TRUE(validate_model(ext).empty());
    const auto base = backdoor_adjust(ext, "X", "x1", "Z", {"A", "G", "M"});
    const auto super = backdoor_adjust(ext, "X", "x1", "Z", {"A", "G", "M", "W"});
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(base.distribution[i], super.distribution[i], 1e-12);
}

TEST(BackdoorAdjust, RandomModelsMatchOracle) {
    std::mt19937_64 rng(99);
    int checked = 0;
    for (int t = 0; t < 60; ++t) {
        const auto dag = oracle::random_dag(rng, 3 + t % 3, 0.5);
        const auto m = oracle::random_model(rng, dag);
        const auto og = oracle::from_dag(dag);
        for (const auto& x : og.ids) {
            for (const auto& z : og.ids) {
                if (x == z) continue;
                for (const auto& set : graph::minimal_adjustment_sets(dag, x, z)) {
                    const auto r = backdoor_adjust(m, x, m.domains.at(x)[0], z, set);
                    const auto truth = oracle::interventional(m, x, m.domains.at(x)[0], z);
                    for (std::size_t i = 0; i < truth.size(); ++i) ASSERT_NEAR(r.distribution[i], truth[i], 1e-12);
                    ASSERT_NEAR(total(r.distribution), 1.0, 1e-9);
                    ++checked;
                }
            }
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(InterventionOracle, SizeGuard) {
    std::string text;
    for (int i = 0; i < 23; ++i) text += "node N" + std::to_string(i) + "\n";
    const auto dag = graph::parse_dag(text);
    DiscreteModel m;
    m.dag = dag;
    for (const auto& n : dag.nodes()) {
        m.domains[n.id] = {"a", "b"};
        m.cpts[n.id] = {n.id, {}, {{{}, {0.5, 0.5}}}};
    }
    EXPECT_THROW(intervention_oracle(m, "N0", "a", "N1"), DomainError);
}

}  // namespace
}  // namespace confound::adjust
