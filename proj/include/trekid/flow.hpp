#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "trekid/mixed_graph.hpp"

namespace trekid {

// Auxiliary network G_flow(A, v) deciding whether a half-trek system with no
// sided intersection exists from some Y subset of A onto pa(v). Every graph
// vertex w contributes two unit-capacity nodes L(w) and R(w); unit node
// capacities enforce the sided-disjointness (Left sets are singleton sources,
// Right sets are the R-nodes a path visits). Arcs:
//   s -> L(a)        for a in A
//   L(w) -> R(w)     for all w          (half-trek whose source is its own top)
//   L(w) -> R(u)     for w <-> u in B   (half-trek opening with a bidirected edge)
//   R(w) -> R(u)     for w -> u in D
//   R(p) -> t        for p in pa(v)
struct FlowNetwork {
    int n = 0;         // graph vertex count
    Vertex target = 0; // the node v whose parents feed the sink
    std::vector<std::pair<int, int>> arcs;

    static constexpr int source_node() { return 0; }
    static constexpr int sink_node() { return 1; }
    static int left_node(Vertex w) { return 2 * w; }
    static int right_node(Vertex w) { return 2 * w + 1; }
    static bool is_left(int node) { return node >= 2 && node % 2 == 0; }
    static bool is_right(int node) { return node >= 2 && node % 2 == 1; }
    static Vertex graph_vertex(int node) { return node / 2; }

    int node_count() const { return 2 * n + 2; }
};

inline FlowNetwork build_flow_network(const MixedGraph& g, const VertexSet& allowed, Vertex v) {
    FlowNetwork net;
    net.n = g.vertex_count();
    net.target = v;
    g.parents(v);  // validates v
    for (Vertex a : allowed) {
        g.parents(a);
        net.arcs.emplace_back(FlowNetwork::source_node(), FlowNetwork::left_node(a));
    }
    for (Vertex w = 1; w <= net.n; ++w)
        net.arcs.emplace_back(FlowNetwork::left_node(w), FlowNetwork::right_node(w));
    for (const auto& [w, u] : g.bidirected_edges()) {
        net.arcs.emplace_back(FlowNetwork::left_node(w), FlowNetwork::right_node(u));
        net.arcs.emplace_back(FlowNetwork::left_node(u), FlowNetwork::right_node(w));
    }
    for (const auto& [w, u] : g.directed_edges())
        net.arcs.emplace_back(FlowNetwork::right_node(w), FlowNetwork::right_node(u));
    for (Vertex p : g.parents(v))
        net.arcs.emplace_back(FlowNetwork::right_node(p), FlowNetwork::sink_node());
    return net;
}

struct MaxFlowResult {
    int value = 0;
    // Unit flow paths through the logical network, each of the form
    // [s, L(a), R(x), ..., R(p), t].
    std::vector<std::vector<int>> paths;
};

// Integral max flow with unit node capacities, via the standard node-splitting
// transformation and shortest augmenting paths. Adjacency lists are built in
// sorted arc order and BFS scans them in order, so the result and the path
// decomposition are deterministic.
inline MaxFlowResult max_flow(const FlowNetwork& net) {
    // Split every logical node x into x_in = 2x, x_out = 2x+1. Internal nodes
    // get a unit in->out arc; s and t are uncapacitated.
    struct Arc {
        int to;
        int cap;
        int rev;  // index of the reverse arc in adj[to]
    };
    const int node_count = 2 * net.node_count();
    std::vector<std::vector<Arc>> adj(node_count);
    auto add_arc = [&adj](int from, int to, int cap) {
        adj[from].push_back(Arc{to, cap, static_cast<int>(adj[to].size())});
        adj[to].push_back(Arc{from, 0, static_cast<int>(adj[from].size()) - 1});
    };

    auto in_of = [](int x) { return 2 * x; };
    auto out_of = [](int x) { return 2 * x + 1; };

    for (int x = 0; x < net.node_count(); ++x) {
        const bool internal = x != FlowNetwork::source_node() && x != FlowNetwork::sink_node();
        add_arc(in_of(x), out_of(x), internal ? 1 : net.n + 1);
    }
    std::vector<std::pair<int, int>> arcs = net.arcs;
    std::sort(arcs.begin(), arcs.end());
    for (const auto& [from, to] : arcs) add_arc(out_of(from), in_of(to), 1);

    const int src = in_of(FlowNetwork::source_node());
    const int snk = out_of(FlowNetwork::sink_node());

    MaxFlowResult result;
    std::vector<int> parent_node(node_count), parent_arc(node_count);
    for (;;) {
        std::fill(parent_node.begin(), parent_node.end(), -1);
        parent_node[src] = src;
        std::vector<int> queue{src};
        for (std::size_t qi = 0; qi < queue.size() && parent_node[snk] == -1; ++qi) {
            int x = queue[qi];
            for (std::size_t ai = 0; ai < adj[x].size(); ++ai) {
                const Arc& a = adj[x][ai];
                if (a.cap > 0 && parent_node[a.to] == -1) {
                    parent_node[a.to] = x;
                    parent_arc[a.to] = static_cast<int>(ai);
                    queue.push_back(a.to);
                }
            }
        }
        if (parent_node[snk] == -1) break;
        // Unit capacities: every augmentation pushes exactly one unit.
        for (int x = snk; x != src; x = parent_node[x]) {
            Arc& a = adj[parent_node[x]][parent_arc[x]];
            a.cap -= 1;
            adj[x][a.rev].cap += 1;
        }
        result.value += 1;
    }

    // Decompose the final flow into unit s-t paths. Flow on a logical arc
    // equals the residual capacity of its reverse arc. The flow is acyclic
    // (R->R arcs follow the DAG; L nodes are fed only by s), so each walk
    // terminates at t.
    std::vector<std::vector<std::pair<int, int>>> flow_out(net.node_count());
    for (int x = 0; x < net.node_count(); ++x) {
        for (const Arc& a : adj[out_of(x)]) {
            if (a.to == in_of(x)) continue;  // skip the residual of the in->out arc
            if (a.to % 2 != 0) continue;     // only forward arcs end at an in-node
            int used = adj[a.to][a.rev].cap;
            if (used > 0) flow_out[x].emplace_back(a.to / 2, used);
        }
    }
    for (int k = 0; k < result.value; ++k) {
        std::vector<int> path{FlowNetwork::source_node()};
        int x = FlowNetwork::source_node();
        while (x != FlowNetwork::sink_node()) {
            auto& outs = flow_out[x];
            std::size_t i = 0;
            while (outs[i].second == 0) ++i;
            outs[i].second -= 1;
            x = outs[i].first;
            path.push_back(x);
        }
        result.paths.push_back(std::move(path));
    }
    return result;
}

// A system of half-treks with pairwise distinct sources, pairwise distinct
// targets, and no sided intersection.
struct HalfTrekSystem {
    std::vector<HalfTrek> half_treks;

    VertexSet sources() const {
        VertexSet out;
        for (const auto& ht : half_treks) out.push_back(ht.source);
        return vset::canonical(out);
    }
    VertexSet targets() const {
        VertexSet out;
        for (const auto& ht : half_treks) out.push_back(ht.target());
        return vset::canonical(out);
    }
};

// Checker written directly from the definitions: every member is a half-trek
// in g, sources and targets are pairwise distinct, the targets are exactly
// `targets`, and Left as well as Right sets are pairwise disjoint.
inline bool is_valid_half_trek_system(const MixedGraph& g, const HalfTrekSystem& sys,
                                      const VertexSet& targets) {
    const auto& treks = sys.half_treks;
    if (treks.size() != targets.size()) return false;
    for (const auto& ht : treks)
        if (!is_half_trek(g, ht)) return false;
    if (sys.sources().size() != treks.size()) return false;
    if (sys.targets() != vset::canonical(targets)) return false;
    for (std::size_t i = 0; i < treks.size(); ++i) {
        for (std::size_t j = i + 1; j < treks.size(); ++j) {
            if (treks[i].source == treks[j].source) return false;
            if (!vset::intersect(treks[i].right_set(), treks[j].right_set()).empty()) return false;
        }
    }
    return true;
}

struct HalfTrekSystemResult {
    bool exists = false;
    HalfTrekSystem system;  // meaningful only when exists
};

// True iff max flow in G_flow(A, v) reaches |pa(v)|; on success the flow paths
// are converted back into half-treks. A path s, L(a), R(x), ... means a
// directed-start half-trek when x == a and a bidirected-start one otherwise.
inline HalfTrekSystemResult half_trek_system_exists(const MixedGraph& g, const VertexSet& allowed,
                                                    Vertex v) {
    FlowNetwork net = build_flow_network(g, vset::canonical(allowed), v);
    MaxFlowResult flow = max_flow(net);
    HalfTrekSystemResult result;
    result.exists = flow.value == static_cast<int>(g.parents(v).size());
    if (!result.exists) return result;
    for (const auto& path : flow.paths) {
        HalfTrek ht;
        ht.source = FlowNetwork::graph_vertex(path[1]);
        for (std::size_t i = 2; i + 1 < path.size(); ++i)
            ht.right.push_back(FlowNetwork::graph_vertex(path[i]));
        ht.starts_bidirected = ht.right.front() != ht.source;
        result.system.half_treks.push_back(std::move(ht));
    }
    return result;
}

namespace detail {

// All half-treks from `source` whose target lies in `targets`.
inline std::vector<HalfTrek> enumerate_half_treks(const MixedGraph& g, Vertex source,
                                                  const VertexSet& targets) {
    std::vector<HalfTrek> out;
    std::vector<Vertex> path;
    auto extend = [&](auto&& self, Vertex at, bool bidirected_start) -> void {
        path.push_back(at);
        if (vset::contains(targets, at)) {
            HalfTrek ht;
            ht.source = source;
            ht.starts_bidirected = bidirected_start;
            ht.right = path;
            out.push_back(std::move(ht));
        }
        for (Vertex c : g.children(at)) self(self, c, bidirected_start);
        path.pop_back();
    };
    extend(extend, source, false);
    for (Vertex u : g.siblings(source)) extend(extend, u, true);
    return out;
}

inline bool assign_system(const VertexSet& targets, std::size_t idx,
                          const std::vector<std::vector<const HalfTrek*>>& by_target,
                          VertexSet& used_sources, std::vector<char>& used_right) {
    if (idx == targets.size()) return true;
    for (const HalfTrek* ht : by_target[idx]) {
        if (vset::contains(used_sources, ht->source)) continue;
        bool clash = false;
        for (Vertex r : ht->right)
            if (used_right[r]) {
                clash = true;
                break;
            }
        if (clash) continue;
        used_sources.insert(std::lower_bound(used_sources.begin(), used_sources.end(), ht->source),
                            ht->source);
        for (Vertex r : ht->right) used_right[r] = 1;
        if (assign_system(targets, idx + 1, by_target, used_sources, used_right)) return true;
        used_sources.erase(std::lower_bound(used_sources.begin(), used_sources.end(), ht->source));
        for (Vertex r : ht->right) used_right[r] = 0;
    }
    return false;
}

}  // namespace detail

// Exhaustive oracle with the same semantics as half_trek_system_exists:
// enumerate every half-trek from each allowed source and search for a
// no-sided-intersection assignment onto pa(v). Acyclicity keeps the trek
// count finite; the limit guards against blowup.
inline bool brute_force_half_trek_system(const MixedGraph& g, const VertexSet& allowed, Vertex v,
                                         int max_vertices = 8) {
    if (g.vertex_count() > max_vertices)
        throw InstanceTooLargeError("brute-force oracle limited to " + std::to_string(max_vertices) +
                                    " vertices, got " + std::to_string(g.vertex_count()));
    const VertexSet targets = g.parents(v);
    if (targets.empty()) return true;

    std::vector<HalfTrek> treks;
    for (Vertex a : vset::canonical(allowed)) {
        auto more = detail::enumerate_half_treks(g, a, targets);
        treks.insert(treks.end(), more.begin(), more.end());
    }
    // Group candidates by target, then backtrack over targets. A right-set
    // clash is checked against vertices, sources against sources.
    std::vector<std::vector<const HalfTrek*>> by_target(targets.size());
    for (const auto& ht : treks) {
        auto it = std::lower_bound(targets.begin(), targets.end(), ht.target());
        by_target[it - targets.begin()].push_back(&ht);
    }
    VertexSet used_sources;
    std::vector<char> used_right(g.vertex_count() + 1, 0);
    return detail::assign_system(targets, 0, by_target, used_sources, used_right);
}

// The half-trek criterion for Y with respect to v:
//   (i) |Y| = |pa(v)|, (ii) Y avoids {v} U sib(v), (iii) a half-trek system
//   with no sided intersection exists from Y onto pa(v).
inline bool satisfies_htc(const MixedGraph& g, const VertexSet& y, Vertex v) {
    const VertexSet ys = vset::canonical(y);
    for (Vertex w : ys) g.parents(w);
    if (ys.size() != g.parents(v).size()) return false;
    if (vset::contains(ys, v)) return false;
    if (!vset::intersect(ys, g.siblings(v)).empty()) return false;
    // With |Y| = |pa(v)|, a flow of value |pa(v)| uses all of Y.
    return half_trek_system_exists(g, ys, v).exists;
}

}  // namespace trekid
