#pragma once

#include <numeric>
#include <vector>

#include "trekid/graphgen.hpp"
#include "trekid/mixed_graph.hpp"
#include "trekid/rng.hpp"

namespace fixtures {

using trekid::Edge;
using trekid::EdgeList;
using trekid::MixedGraph;
using trekid::Rng;
using trekid::Vertex;
using trekid::VertexSet;

// The running 6-vertex example graph: HTC-inconclusive but shown generically
// identifiable by the ancestral decomposition.
inline MixedGraph fig1a() {
    return MixedGraph(6,
                      {{1, 2}, {1, 3}, {1, 6}, {2, 3}, {2, 4}, {2, 5}, {2, 6}, {3, 4}, {4, 5}},
                      {{1, 4}, {1, 6}, {2, 3}, {2, 5}, {2, 6}});
}

// fig1a restricted to the ancestral set {1,...,5}.
inline MixedGraph fig1b() {
    return MixedGraph(5, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {2, 5}, {3, 4}, {4, 5}},
                      {{1, 4}, {2, 3}, {2, 5}});
}

// The two mixed components of fig1b, as standalone graphs.
inline MixedGraph fig1c_left() {  // C = {1,4}
    return MixedGraph(4, {{2, 4}, {3, 4}}, {{1, 4}});
}
inline MixedGraph fig1c_right() {  // C = {2,3,5}
    return MixedGraph(5, {{1, 2}, {1, 3}, {2, 3}, {2, 5}, {4, 5}}, {{2, 3}, {2, 5}});
}

// The canonical unidentifiable motif: 1 -> 2 plus 1 <-> 2.
inline MixedGraph bow() { return MixedGraph(2, {{1, 2}}, {{1, 2}}); }

inline MixedGraph chain2() { return MixedGraph(2, {{1, 2}}, {}); }

// Random mixed graph where each pair i < j independently gets a directed and
// a bidirected edge; unlike the library generator this has no spanning tree,
// so disconnected bidirected parts occur.
inline MixedGraph random_graph_uniform(int n, double p_bidirected, double q_directed, Rng& rng) {
    EdgeList d, b;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            if (rng.bernoulli(q_directed)) d.emplace_back(i, j);
            if (rng.bernoulli(p_bidirected)) b.emplace_back(i, j);
        }
    }
    return MixedGraph(n, std::move(d), std::move(b));
}

// All 2^pairs x 2^pairs labeled mixed graphs on n vertices whose directed
// edges follow the vertex order (so every one is acyclic).
inline std::vector<MixedGraph> all_mixed_graphs(int n) {
    std::vector<Edge> pairs;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);
    const std::size_t m = pairs.size();
    std::vector<MixedGraph> out;
    out.reserve((1u << m) * (1u << m));
    for (unsigned dm = 0; dm < (1u << m); ++dm) {
        for (unsigned bm = 0; bm < (1u << m); ++bm) {
            EdgeList d, b;
            for (std::size_t k = 0; k < m; ++k) {
                if (dm & (1u << k)) d.push_back(pairs[k]);
                if (bm & (1u << k)) b.push_back(pairs[k]);
            }
            out.emplace_back(n, std::move(d), std::move(b));
        }
    }
    return out;
}

// perm maps old labels to new ones; perm[0] is unused.
inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> perm(n + 1);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n; i > 1; --i) {
        int j = rng.uniform_int(1, i);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

inline MixedGraph relabel(const MixedGraph& g, const std::vector<int>& perm) {
    EdgeList d, b;
    for (const auto& [v, w] : g.directed_edges()) d.emplace_back(perm[v], perm[w]);
    for (const auto& [v, w] : g.bidirected_edges()) b.emplace_back(perm[v], perm[w]);
    return MixedGraph(g.vertex_count(), std::move(d), std::move(b));
}

inline VertexSet map_set(const VertexSet& s, const std::vector<int>& perm) {
    VertexSet out;
    for (Vertex v : s) out.push_back(perm[v]);
    return trekid::vset::canonical(out);
}

}  // namespace fixtures
