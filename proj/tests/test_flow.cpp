#include "trekid/flow.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace trekid;
using fixtures::bow;
using fixtures::fig1a;

namespace {

struct ArcCounts {
    int source = 0, sink = 0, self = 0, bidirected = 0, directed = 0;
};

ArcCounts count_arcs(const FlowNetwork& net) {
    ArcCounts c;
    for (const auto& [from, to] : net.arcs) {
        if (from == FlowNetwork::source_node())
            ++c.source;
        else if (to == FlowNetwork::sink_node())
            ++c.sink;
        else if (FlowNetwork::is_left(from) && FlowNetwork::graph_vertex(from) == FlowNetwork::graph_vertex(to))
            ++c.self;
        else if (FlowNetwork::is_left(from))
            ++c.bidirected;
        else
            ++c.directed;
    }
    return c;
}

}  // namespace

TEST(BuildFlowNetwork, Fig1aArcCounts) {
    FlowNetwork net = build_flow_network(fig1a(), {3, 4}, 6);
    ArcCounts c = count_arcs(net);
    EXPECT_EQ(c.source, 2);
    EXPECT_EQ(c.directed, 9);  // one R->R arc per directed edge
    EXPECT_EQ(c.sink, 2);      // pa(6) = {1,2}
    EXPECT_EQ(c.self, 6);      // one L->R arc per vertex
    EXPECT_EQ(c.bidirected, 10);
}

TEST(BuildFlowNetwork, EmptyAllowedSetHasZeroFlow) {
    FlowNetwork net = build_flow_network(fig1a(), {}, 6);
    EXPECT_EQ(count_arcs(net).source, 0);
    EXPECT_EQ(max_flow(net).value, 0);
}

TEST(BuildFlowNetwork, NoParentsIsVacuouslySatisfiable) {
    FlowNetwork net = build_flow_network(fig1a(), {2, 3}, 1);
    EXPECT_EQ(count_arcs(net).sink, 0);
    EXPECT_EQ(max_flow(net).value, 0);
    EXPECT_TRUE(half_trek_system_exists(fig1a(), {2, 3}, 1).exists);
}

TEST(MaxFlow, Fig1aValueTwo) {
    EXPECT_EQ(max_flow(build_flow_network(fig1a(), {3, 4}, 6)).value, 2);
}

TEST(MaxFlow, BowWithEmptyAllowedSet) {
    EXPECT_EQ(max_flow(build_flow_network(bow(), {}, 2)).value, 0);
}

TEST(MaxFlow, PathsDecomposeTheFlow) {
    MaxFlowResult flow = max_flow(build_flow_network(fig1a(), {3, 4, 5}, 6));
    EXPECT_EQ(flow.value, 2);
    ASSERT_EQ(flow.paths.size(), 2u);
    for (const auto& path : flow.paths) {
        EXPECT_EQ(path.front(), FlowNetwork::source_node());
        EXPECT_EQ(path.back(), FlowNetwork::sink_node());
        EXPECT_TRUE(FlowNetwork::is_left(path[1]));
        for (std::size_t i = 2; i + 1 < path.size(); ++i) EXPECT_TRUE(FlowNetwork::is_right(path[i]));
    }
}

TEST(MaxFlow, MonotoneInAllowedSetAndBounded) {
    Rng rng(424242);
    for (int iter = 0; iter < 80; ++iter) {
        MixedGraph g = fixtures::random_graph_uniform(6, 0.3, 0.4, rng);
        Vertex v = rng.uniform_int(1, 6);
        VertexSet small, large;
        for (Vertex w = 1; w <= 6; ++w) {
            if (rng.bernoulli(0.5)) large.push_back(w);
        }
        for (Vertex w : large)
            if (rng.bernoulli(0.6)) small.push_back(w);
        int f_small = max_flow(build_flow_network(g, small, v)).value;
        int f_large = max_flow(build_flow_network(g, large, v)).value;
        EXPECT_LE(f_small, f_large);
        EXPECT_LE(f_large, static_cast<int>(std::min(large.size(), g.parents(v).size())));
    }
}

TEST(HalfTrekSystemExists, Fig1aSystemForVertex6) {
    auto result = half_trek_system_exists(fig1a(), {3, 4}, 6);
    ASSERT_TRUE(result.exists);
    EXPECT_TRUE(is_valid_half_trek_system(fig1a(), result.system, {1, 2}));
    EXPECT_EQ(result.system.sources(), (VertexSet{3, 4}));
    // the unique system here: 3 <-> 2 (onto 2) and 4 <-> 1 (onto 1)
    for (const HalfTrek& ht : result.system.half_treks) {
        EXPECT_TRUE(ht.starts_bidirected);
        EXPECT_EQ(ht.right.size(), 1u);
    }
}

TEST(HalfTrekSystemExists, DagParentsSolveThemselves) {
    Rng rng(7);
    for (int iter = 0; iter < 30; ++iter) {
        MixedGraph g = fixtures::random_graph_uniform(6, 0.0, 0.5, rng);
        for (Vertex v = 1; v <= 6; ++v) {
            auto result = half_trek_system_exists(g, g.parents(v), v);
            EXPECT_TRUE(result.exists);
            EXPECT_TRUE(is_valid_half_trek_system(g, result.system, g.parents(v)));
        }
    }
}

TEST(HalfTrekSystemExists, ExtractedSystemsRevalidate) {
    Rng rng(1234);
    for (int iter = 0; iter < 200; ++iter) {
        MixedGraph g = fixtures::random_graph_uniform(6, 0.35, 0.4, rng);
        Vertex v = rng.uniform_int(1, 6);
        VertexSet allowed;
        for (Vertex w = 1; w <= 6; ++w)
            if (rng.bernoulli(0.5)) allowed.push_back(w);
        auto result = half_trek_system_exists(g, allowed, v);
        if (!result.exists) continue;
        EXPECT_TRUE(is_valid_half_trek_system(g, result.system, g.parents(v)));
        for (const HalfTrek& ht : result.system.half_treks)
            EXPECT_TRUE(vset::contains(allowed, ht.source));
    }
}

TEST(BruteForce, AgreesOnAllGraphsWithThreeVertices) {
    for (const MixedGraph& g : fixtures::all_mixed_graphs(3)) {
        for (Vertex v = 1; v <= 3; ++v) {
            for (unsigned mask = 0; mask < 8; ++mask) {
                VertexSet allowed;
                for (Vertex w = 1; w <= 3; ++w)
                    if (mask & (1u << (w - 1))) allowed.push_back(w);
                ASSERT_EQ(half_trek_system_exists(g, allowed, v).exists,
                          brute_force_half_trek_system(g, allowed, v))
                    << "v=" << v << " mask=" << mask;
            }
        }
    }
}

TEST(BruteForce, AgreesOnRandomInstances) {
    Rng rng(987);
    for (int iter = 0; iter < 300; ++iter) {
        int n = rng.uniform_int(4, 6);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.3, 0.4, rng);
        Vertex v = rng.uniform_int(1, n);
        VertexSet allowed;
        for (Vertex w = 1; w <= n; ++w)
            if (rng.bernoulli(0.5)) allowed.push_back(w);
        ASSERT_EQ(half_trek_system_exists(g, allowed, v).exists,
                  brute_force_half_trek_system(g, allowed, v));
    }
}

TEST(BruteForce, Fig1aExampleAndSizeLimit) {
    EXPECT_TRUE(brute_force_half_trek_system(fig1a(), {3, 4}, 6));
    MixedGraph big(9, {}, {});
    EXPECT_THROW(brute_force_half_trek_system(big, {1}, 2), InstanceTooLargeError);
}

TEST(SatisfiesHtc, Fig1aExample) {
    EXPECT_TRUE(satisfies_htc(fig1a(), {3, 4}, 6));
}

TEST(SatisfiesHtc, DagParents) {
    MixedGraph g(4, {{1, 3}, {2, 3}, {3, 4}}, {});
    EXPECT_TRUE(satisfies_htc(g, {1, 2}, 3));
    EXPECT_TRUE(satisfies_htc(g, {3}, 4));
}

TEST(SatisfiesHtc, SiblingOrSizeViolations) {
    MixedGraph g = fig1a();
    EXPECT_FALSE(satisfies_htc(g, {1, 3}, 6));     // 1 is a sibling of 6
    EXPECT_FALSE(satisfies_htc(g, {3}, 6));        // |Y| != |pa(6)|
    EXPECT_FALSE(satisfies_htc(g, {3, 4, 5}, 6));  // |Y| != |pa(6)|
    EXPECT_FALSE(satisfies_htc(bow(), {2}, 2));    // v itself
}
