#include "confound/dag_dsl.hpp"

#include <gtest/gtest.h>

#include <random>

#include "confound/error.hpp"
#include "oracles.hpp"

namespace confound::graph {
namespace {

ParseError parse_failure(const std::string& text) {
    try {
        parse_dag(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "no parse error for:\n" << text;
    return ParseError("none", 0);
}

TEST(DagDsl, EmptyGraph) {
    EXPECT_EQ(parse_dag("").size(), 0u);
    EXPECT_EQ(parse_dag("# nothing\n\ndag empty\n").name(), "empty");
}

TEST(DagDsl, LabelsAndLatent) {
    const auto g = parse_dag("dag g\nnode X \"The \\\"artist\\\"\"\nnode E \"Emotions\" latent  # hidden\nnode Q\n");
    EXPECT_EQ(g.node("X").label, "The \"artist\"");
    EXPECT_TRUE(g.is_latent("E"));
    EXPECT_EQ(g.node("Q").label, "Q");
}

TEST(DagDsl, ErrorsCarryPosition) {
    const auto self = parse_failure("node X\nedge X -> X\n");
    EXPECT_EQ(self.line(), 2u);
    EXPECT_NE(std::string(self.what()).find("self-loop"), std::string::npos);

    const auto unknown = parse_failure("node X\nedge X -> Y\n");
    EXPECT_EQ(unknown.line(), 2u);
    EXPECT_EQ(unknown.column(), 11u);

    EXPECT_EQ(parse_failure("node X\nnode X\n").line(), 2u);
    EXPECT_EQ(parse_failure("node X\nnode Y\nedge X -> Y\nedge X -> Y\n").line(), 4u);
    EXPECT_EQ(parse_failure("node X\ndag late\n").line(), 2u);
    EXPECT_EQ(parse_failure("node 9x\n").line(), 1u);
    EXPECT_EQ(parse_failure("node X\nnode Y\nedge X Y\n").line(), 3u);
    EXPECT_EQ(parse_failure("vertex X\n").line(), 1u);
    EXPECT_EQ(parse_failure("node X \"open\n").line(), 1u);
}

TEST(DagDsl, CycleIsValidationError) {
    EXPECT_THROW(parse_dag("node A\nnode B\nedge A -> B\nedge B -> A\n"), ValidationError);
}

TEST(DagDsl, SerializeRoundTrip) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto g = oracle::random_dag(rng, 1 + t % 8, 0.4, 3);
        const auto back = parse_dag(serialize_dag(g));
        EXPECT_EQ(back.name(), g.name());
        ASSERT_EQ(back.size(), g.size());
        for (const auto& n : g.nodes()) {
            EXPECT_EQ(back.node(n.id).label, n.label);
            EXPECT_EQ(back.node(n.id).kind, n.kind);
        }
        auto a = g.edges(), b = back.edges();
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
    }
}

TEST(DagDsl, MissingFile) {
    EXPECT_THROW(load_dag("/nonexistent/graph.dag"), Error);
}

}  // namespace
}  // namespace confound::graph
