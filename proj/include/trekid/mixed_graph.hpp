#pragma once

#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "trekid/errors.hpp"
#include "trekid/vset.hpp"

namespace trekid {

using Edge = std::pair<Vertex, Vertex>;
using EdgeList = std::vector<Edge>;

class MixedGraph;

// Result of restricting a graph to a vertex subset. The subgraph is relabeled
// to 1..|V'|; original_labels[i-1] gives the source-graph vertex of local
// vertex i. Labels are ascending, so relative order is preserved.
struct InducedSubgraph;

// One mixed component G_i = (V_i, D_i, B_i) of the Tian decomposition:
// C_i is a connected component of the bidirected part, V_i = C_i U pa(C_i),
// D_i keeps the directed edges pointing into C_i and B_i the bidirected edges
// inside C_i. Stored relabeled, with maps back to the source graph.
struct MixedComponent;

// A half-trek is a trek whose Left side is a single vertex: either
//   source -> r1 -> ... -> rk          (the source is its own top node), or
//   source <-> r0 -> r1 -> ... -> rk   (starts with a bidirected edge).
// In the first form the source belongs to both Left and Right, so `right`
// starts with the source itself.
struct HalfTrek {
    Vertex source = 0;
    bool starts_bidirected = false;
    std::vector<Vertex> right;  // ordered; consecutive entries are directed edges

    VertexSet left_set() const { return {source}; }
    VertexSet right_set() const { return vset::canonical(right); }
    Vertex target() const { return right.back(); }

    friend bool operator==(const HalfTrek&, const HalfTrek&) = default;
};

// Immutable acyclic mixed graph G = (V, D, B) on vertices 1..n. Directed
// edges are ordered pairs (v,w) for v->w; bidirected edges are stored
// canonically as (min,max). Construction validates: indices in range, no
// self-loops, directed part acyclic. All queries are pure.
class MixedGraph {
public:
    MixedGraph(int n, EdgeList directed, EdgeList bidirected)
        : n_(n) {
        if (n < 0) throw VertexOutOfRangeError("vertex count must be nonnegative, got " + std::to_string(n));
        for (auto& [v, w] : directed) {
            check_vertex(v);
            check_vertex(w);
            if (v == w) throw SelfLoopError("directed self-loop at vertex " + std::to_string(v));
        }
        for (auto& [v, w] : bidirected) {
            check_vertex(v);
            check_vertex(w);
            if (v == w) throw SelfLoopError("bidirected self-loop at vertex " + std::to_string(v));
            if (v > w) std::swap(v, w);  // canonicalize unordered pair
        }
        std::sort(directed.begin(), directed.end());
        directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
        std::sort(bidirected.begin(), bidirected.end());
        bidirected.erase(std::unique(bidirected.begin(), bidirected.end()), bidirected.end());
        directed_ = std::move(directed);
        bidirected_ = std::move(bidirected);

        children_.resize(n + 1);
        parents_.resize(n + 1);
        siblings_.resize(n + 1);
        for (const auto& [v, w] : directed_) {
            children_[v].push_back(w);
            parents_[w].push_back(v);
        }
        for (const auto& [v, w] : bidirected_) {
            siblings_[v].push_back(w);
            siblings_[w].push_back(v);
        }
        for (int v = 1; v <= n; ++v) std::sort(siblings_[v].begin(), siblings_[v].end());
        // children_/parents_ are already sorted: directed_ is sorted by (v,w).

        topo_ = compute_topological_order();
    }

    int vertex_count() const { return n_; }
    const EdgeList& directed_edges() const { return directed_; }
    const EdgeList& bidirected_edges() const { return bidirected_; }

    bool has_directed_edge(Vertex v, Vertex w) const {
        return std::binary_search(directed_.begin(), directed_.end(), Edge{v, w});
    }
    bool has_bidirected_edge(Vertex v, Vertex w) const {
        if (v > w) std::swap(v, w);
        return std::binary_search(bidirected_.begin(), bidirected_.end(), Edge{v, w});
    }

    const VertexSet& parents(Vertex v) const {
        check_vertex(v);
        return parents_[v];
    }
    const VertexSet& children(Vertex v) const {
        check_vertex(v);
        return children_[v];
    }
    const VertexSet& siblings(Vertex v) const {
        check_vertex(v);
        return siblings_[v];
    }

    VertexSet all_vertices() const {
        VertexSet out(n_);
        for (int v = 1; v <= n_; ++v) out[v - 1] = v;
        return out;
    }

    // Every directed edge goes forward in this sequence; ties are broken by
    // ascending vertex index, so the order is deterministic.
    const std::vector<Vertex>& topological_order() const { return topo_; }

    // An(V'): vertices with a directed path into V'. The empty path counts,
    // so V' is always included.
    VertexSet ancestors(const VertexSet& start) const {
        std::vector<char> seen(n_ + 1, 0);
        std::vector<Vertex> stack;
        for (Vertex v : start) {
            check_vertex(v);
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex p : parents_[v]) {
                if (!seen[p]) {
                    seen[p] = 1;
                    stack.push_back(p);
                }
            }
        }
        return collect(seen);
    }

    bool is_ancestral(const VertexSet& verts) const {
        return ancestors(verts) == vset::canonical(verts);
    }

    // Vertices reachable from v by a directed path (v itself included via the
    // empty path).
    VertexSet descendants(Vertex v) const {
        check_vertex(v);
        std::vector<char> seen(n_ + 1, 0);
        reach_forward(v, seen);
        return collect(seen);
    }

    // htr(v): vertices outside {v} U sib(v) reachable from v by a half-trek.
    // Directed-start treks reach the descendants of v's children; treks that
    // open with v <-> u reach u and its descendants.
    VertexSet half_trek_reachable(Vertex v) const {
        check_vertex(v);
        std::vector<char> seen(n_ + 1, 0);
        for (Vertex c : children_[v]) reach_forward(c, seen);
        for (Vertex u : siblings_[v]) reach_forward(u, seen);
        seen[v] = 0;
        for (Vertex u : siblings_[v]) seen[u] = 0;
        return collect(seen);
    }

    InducedSubgraph induced_subgraph(const VertexSet& verts) const;
    std::vector<MixedComponent> mixed_components() const;

    friend bool operator==(const MixedGraph& a, const MixedGraph& b) {
        return a.n_ == b.n_ && a.directed_ == b.directed_ && a.bidirected_ == b.bidirected_;
    }

private:
    void check_vertex(Vertex v) const {
        if (v < 1 || v > n_)
            throw VertexOutOfRangeError("vertex " + std::to_string(v) + " outside 1.." + std::to_string(n_));
    }

    void reach_forward(Vertex start, std::vector<char>& seen) const {
        if (seen[start]) return;
        seen[start] = 1;
        std::vector<Vertex> stack{start};
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex c : children_[v]) {
                if (!seen[c]) {
                    seen[c] = 1;
                    stack.push_back(c);
                }
            }
        }
    }

    VertexSet collect(const std::vector<char>& seen) const {
        VertexSet out;
        for (int v = 1; v <= n_; ++v)
            if (seen[v]) out.push_back(v);
        return out;
    }

    std::vector<Vertex> compute_topological_order() const {
        std::vector<int> indegree(n_ + 1, 0);
        for (const auto& [v, w] : directed_) {
            (void)v;
            ++indegree[w];
        }
        std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
        for (int v = 1; v <= n_; ++v)
            if (indegree[v] == 0) ready.push(v);
        std::vector<Vertex> order;
        order.reserve(n_);
        while (!ready.empty()) {
            Vertex v = ready.top();
            ready.pop();
            order.push_back(v);
            for (Vertex c : children_[v])
                if (--indegree[c] == 0) ready.push(c);
        }
        if (static_cast<int>(order.size()) != n_) {
            for (int v = 1; v <= n_; ++v)
                if (indegree[v] > 0)
                    throw DirectedCycleError("directed part contains a cycle through vertex " + std::to_string(v));
        }
        return order;
    }

    int n_ = 0;
    EdgeList directed_;
    EdgeList bidirected_;
    std::vector<VertexSet> children_;   // 1-indexed
    std::vector<VertexSet> parents_;    // 1-indexed
    std::vector<VertexSet> siblings_;   // 1-indexed
    std::vector<Vertex> topo_;
};

struct InducedSubgraph {
    MixedGraph graph;
    std::vector<Vertex> original_labels;  // local vertex i -> original_labels[i-1]

    Vertex to_original(Vertex local) const { return original_labels[local - 1]; }
    Vertex to_local(Vertex original) const {
        auto it = std::lower_bound(original_labels.begin(), original_labels.end(), original);
        return static_cast<Vertex>(it - original_labels.begin()) + 1;
    }
};

struct MixedComponent {
    MixedGraph graph;                     // relabeled to 1..|V_i|
    std::vector<Vertex> original_labels;  // local vertex i -> original_labels[i-1]
    VertexSet c_set;                      // the block C_i, in original labels

    Vertex to_original(Vertex local) const { return original_labels[local - 1]; }
    Vertex to_local(Vertex original) const {
        auto it = std::lower_bound(original_labels.begin(), original_labels.end(), original);
        return static_cast<Vertex>(it - original_labels.begin()) + 1;
    }
};

inline InducedSubgraph MixedGraph::induced_subgraph(const VertexSet& verts) const {
    VertexSet keep = vset::canonical(verts);
    for (Vertex v : keep) check_vertex(v);
    auto local = [&keep](Vertex v) {
        auto it = std::lower_bound(keep.begin(), keep.end(), v);
        return static_cast<Vertex>(it - keep.begin()) + 1;
    };
    EdgeList d, b;
    for (const auto& [v, w] : directed_)
        if (vset::contains(keep, v) && vset::contains(keep, w)) d.emplace_back(local(v), local(w));
    for (const auto& [v, w] : bidirected_)
        if (vset::contains(keep, v) && vset::contains(keep, w)) b.emplace_back(local(v), local(w));
    return InducedSubgraph{MixedGraph(static_cast<int>(keep.size()), std::move(d), std::move(b)), keep};
}

inline std::vector<MixedComponent> MixedGraph::mixed_components() const {
    // Connected components of the bidirected part, found by search; component
    // ids are assigned in ascending order of smallest member.
    std::vector<int> comp(n_ + 1, -1);
    int count = 0;
    for (int v = 1; v <= n_; ++v) {
        if (comp[v] != -1) continue;
        int id = count++;
        std::vector<Vertex> stack{v};
        comp[v] = id;
        while (!stack.empty()) {
            Vertex x = stack.back();
            stack.pop_back();
            for (Vertex u : siblings_[x]) {
                if (comp[u] == -1) {
                    comp[u] = id;
                    stack.push_back(u);
                }
            }
        }
    }

    std::vector<VertexSet> blocks(count);
    for (int v = 1; v <= n_; ++v) blocks[comp[v]].push_back(v);

    std::vector<MixedComponent> out;
    out.reserve(count);
    for (const VertexSet& c : blocks) {
        VertexSet vi = c;
        for (Vertex v : c)
            for (Vertex p : parents_[v]) vi.push_back(p);
        vi = vset::canonical(vi);
        auto local = [&vi](Vertex v) {
            auto it = std::lower_bound(vi.begin(), vi.end(), v);
            return static_cast<Vertex>(it - vi.begin()) + 1;
        };
        EdgeList d, b;
        for (const auto& [x, w] : directed_)
            if (vset::contains(c, w)) d.emplace_back(local(x), local(w));
        for (const auto& [x, w] : bidirected_)
            if (vset::contains(c, x)) b.emplace_back(local(x), local(w));  // both ends lie in C
        out.push_back(MixedComponent{MixedGraph(static_cast<int>(vi.size()), std::move(d), std::move(b)), vi, c});
    }
    return out;
}

// Checks the half-trek shape directly against the definition: Left is the
// singleton {source}, the right side follows directed edges, and the opening
// step is either the source itself or a bidirected edge at the source.
inline bool is_half_trek(const MixedGraph& g, const HalfTrek& ht) {
    if (ht.right.empty()) return false;
    if (ht.starts_bidirected) {
        if (!g.has_bidirected_edge(ht.source, ht.right.front())) return false;
    } else {
        if (ht.right.front() != ht.source) return false;
    }
    for (std::size_t i = 0; i + 1 < ht.right.size(); ++i)
        if (!g.has_directed_edge(ht.right[i], ht.right[i + 1])) return false;
    return true;
}

}  // namespace trekid
