#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "trekid/mixed_graph.hpp"
#include "trekid/rng.hpp"

namespace trekid {

struct GenConfig {
    int n = 1;
    double p = 0.0;        // bidirected edge probability
    double q = 0.0;        // directed edge probability
    std::uint64_t seed = 0;
};

// Uniform random labeled spanning tree on 1..n, via a uniform Pruefer
// sequence. n = 1 yields the empty edge set.
inline EdgeList random_spanning_tree(int n, Rng& rng) {
    if (n <= 1) return {};
    if (n == 2) return {{1, 2}};
    std::vector<int> pruefer(n - 2);
    for (int& x : pruefer) x = rng.uniform_int(1, n);

    std::vector<int> degree(n + 1, 1);
    for (int x : pruefer) ++degree[x];
    std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
    for (int v = 1; v <= n; ++v)
        if (degree[v] == 1) leaves.push(v);

    EdgeList edges;
    edges.reserve(n - 1);
    for (int x : pruefer) {
        int leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(std::min(leaf, x), std::max(leaf, x));
        if (--degree[x] == 1) leaves.push(x);
    }
    int u = leaves.top();
    leaves.pop();
    int w = leaves.top();
    edges.emplace_back(std::min(u, w), std::max(u, w));
    return edges;
}

// Random acyclic mixed graph with connected bidirected part: a bidirected
// spanning tree, then every pair i < j gets a bidirected edge with
// probability p and a directed edge i -> j with probability q. Acyclicity
// holds by construction since directed edges respect the vertex order. The
// passes run in a fixed order (tree, bidirected, directed; pairs
// lexicographic), so the rng state determines the graph.
inline MixedGraph random_mixed_graph(const GenConfig& cfg, Rng& rng) {
    EdgeList bidirected = random_spanning_tree(cfg.n, rng);
    for (int i = 1; i <= cfg.n; ++i)
        for (int j = i + 1; j <= cfg.n; ++j)
            if (rng.bernoulli(cfg.p)) bidirected.emplace_back(i, j);
    EdgeList directed;
    for (int i = 1; i <= cfg.n; ++i)
        for (int j = i + 1; j <= cfg.n; ++j)
            if (rng.bernoulli(cfg.q)) directed.emplace_back(i, j);
    return MixedGraph(cfg.n, std::move(directed), std::move(bidirected));
}

inline MixedGraph random_mixed_graph(const GenConfig& cfg) {
    Rng rng(cfg.seed);
    return random_mixed_graph(cfg, rng);
}

}  // namespace trekid
