#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trekid/flow.hpp"
#include "trekid/mixed_graph.hpp"

namespace trekid {

// Which check established a node's identifiability. `baseline` covers both
// the plain HTC algorithm and nodes that are solved at initialization
// (pa(v) empty); the two ancestral phases correspond to the first and second
// component checks of the ancestral-decomposition algorithm.
enum class SolutionPhase { baseline, extended_ancestral, plain_ancestral };

// The subgraph a node was solved in, all in original vertex labels. For
// baseline solutions the context is the whole graph and c_set is empty; for
// ancestral phases it is the mixed component (over `vertices`) of the graph
// induced by `ancestral_set` that contains the node.
struct SolutionContext {
    VertexSet ancestral_set;
    VertexSet c_set;
    VertexSet vertices;

    friend bool operator==(const SolutionContext&, const SolutionContext&) = default;
};

struct NodeSolution {
    Vertex v = 0;
    SolutionPhase phase = SolutionPhase::baseline;
    SolutionContext context;
    VertexSet allowed;      // final allowed set, original labels; excludes {v} U sib(v)
    HalfTrekSystem system;  // half-treks in original labels; targets = pa(v)

    friend bool operator==(const NodeSolution& a, const NodeSolution& b) {
        return a.v == b.v && a.phase == b.phase && a.context == b.context &&
               a.allowed == b.allowed && a.system.half_treks == b.system.half_treks;
    }
};

struct HtcuWitness {
    int component = 0;  // 1-based index into mixed_components()
    Vertex v = 0;       // the node whose maximal-allowed-set flow falls short

    friend bool operator==(const HtcuWitness&, const HtcuWitness&) = default;
};

enum class GraphStatus { generically_identifiable, generically_unidentifiable, inconclusive };

struct SolveResult {
    bool identified = false;
    std::vector<NodeSolution> solutions;  // solve order; covers all nodes iff identified
    int sweeps = 0;
};

struct HtcuResult {
    bool unidentifiable = false;
    std::optional<HtcuWitness> witness;
};

struct IdReport {
    bool htci_plain = false;
    bool htcu = false;
    std::optional<HtcuWitness> htcu_witness;
    bool alg1 = false;
    std::vector<NodeSolution> certificate;  // ancestral algorithm's solve order, when alg1
    GraphStatus status = GraphStatus::inconclusive;

    friend bool operator==(const IdReport&, const IdReport&) = default;
};

namespace detail {

// A mixed component used as the solving context, with labels composed back to
// the original graph.
struct ContextGraph {
    MixedGraph graph;
    std::vector<Vertex> labels;  // local -> original
    VertexSet c_set;             // original labels
    VertexSet vertices;          // original labels (sorted; equals labels)

    Vertex to_original(Vertex local) const { return labels[local - 1]; }
    Vertex to_local(Vertex original) const {
        auto it = std::lower_bound(labels.begin(), labels.end(), original);
        return static_cast<Vertex>(it - labels.begin()) + 1;
    }
};

// The mixed component of G_{ancestral_set} containing v, relabeled with maps
// back to G. Both label maps are ascending, so their composition preserves
// relative vertex order.
inline ContextGraph component_context(const MixedGraph& g, const VertexSet& ancestral_set,
                                      Vertex v) {
    InducedSubgraph sub = g.induced_subgraph(ancestral_set);
    const Vertex sub_v = sub.to_local(v);
    for (auto& mc : sub.graph.mixed_components()) {
        if (!vset::contains(mc.c_set, sub_v)) continue;
        std::vector<Vertex> labels(mc.original_labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
            labels[i] = sub.to_original(mc.original_labels[i]);
        VertexSet c_orig;
        c_orig.reserve(mc.c_set.size());
        for (Vertex c : mc.c_set) c_orig.push_back(sub.to_original(c));
        return ContextGraph{std::move(mc.graph), labels, c_orig, labels};
    }
    throw Error("vertex " + std::to_string(v) + " missing from its own decomposition");
}

inline VertexSet siblings_of_set(const MixedGraph& g, const VertexSet& s) {
    VertexSet out;
    for (Vertex v : s) out = vset::unite(out, g.siblings(v));
    return out;
}

// Attempt to solve v inside the mixed component of G_{ancestral_set}
// containing it. The allowed set is `a_base` restricted to the component plus
// the component's source nodes (vertices without parents there: component
// parents and parentless block members, all trivially identified in the
// component), always minus {v} and its siblings.
inline std::optional<NodeSolution> try_component_solve(const MixedGraph& g, Vertex v,
                                                       const VertexSet& a_base,
                                                       const VertexSet& ancestral_set,
                                                       SolutionPhase phase) {
    ContextGraph ctx = component_context(g, ancestral_set, v);
    const Vertex lv = ctx.to_local(v);

    VertexSet allowed;
    for (Vertex a : vset::intersect(a_base, ctx.vertices)) allowed.push_back(ctx.to_local(a));
    for (Vertex w = 1; w <= ctx.graph.vertex_count(); ++w)
        if (ctx.graph.parents(w).empty()) allowed.push_back(w);
    allowed = vset::canonical(allowed);
    allowed = vset::minus(allowed, vset::unite(VertexSet{lv}, ctx.graph.siblings(lv)));

    HalfTrekSystemResult flow = half_trek_system_exists(ctx.graph, allowed, lv);
    if (!flow.exists) return std::nullopt;

    NodeSolution sol;
    sol.v = v;
    sol.phase = phase;
    sol.context = SolutionContext{ancestral_set, ctx.c_set, ctx.vertices};
    for (Vertex a : allowed) sol.allowed.push_back(ctx.to_original(a));
    for (const HalfTrek& ht : flow.system.half_treks) {
        HalfTrek mapped;
        mapped.source = ctx.to_original(ht.source);
        mapped.starts_bidirected = ht.starts_bidirected;
        for (Vertex r : ht.right) mapped.right.push_back(ctx.to_original(r));
        sol.system.half_treks.push_back(std::move(mapped));
    }
    return sol;
}

}  // namespace detail

// The plain HTC algorithm: starting from the parentless nodes, repeatedly try
// to certify an unsolved v with allowed set
//   (SolvedNodes U (V \ htr(v))) \ ({v} U sib(v)),
// sweeping nodes in ascending order until everything is solved or a full
// sweep makes no progress.
inline SolveResult htc_identifiable(const MixedGraph& g) {
    const int n = g.vertex_count();
    const VertexSet all = g.all_vertices();
    SolveResult res;
    std::vector<char> solved(n + 1, 0);
    VertexSet solved_set;
    for (Vertex v = 1; v <= n; ++v) {
        if (g.parents(v).empty()) {
            solved[v] = 1;
            solved_set.push_back(v);
            res.solutions.push_back(
                NodeSolution{v, SolutionPhase::baseline, SolutionContext{all, {}, all}, {}, {}});
        }
    }
    std::vector<VertexSet> htr(n + 1);
    for (Vertex v = 1; v <= n; ++v) htr[v] = g.half_trek_reachable(v);

    bool changed = true;
    while (changed && static_cast<int>(solved_set.size()) < n) {
        changed = false;
        ++res.sweeps;
        for (Vertex v = 1; v <= n; ++v) {
            if (solved[v]) continue;
            VertexSet allowed = vset::unite(solved_set, vset::minus(all, htr[v]));
            allowed = vset::minus(allowed, vset::unite(VertexSet{v}, g.siblings(v)));
            HalfTrekSystemResult flow = half_trek_system_exists(g, allowed, v);
            if (!flow.exists) continue;
            solved[v] = 1;
            solved_set.insert(std::lower_bound(solved_set.begin(), solved_set.end(), v), v);
            res.solutions.push_back(NodeSolution{v, SolutionPhase::baseline,
                                                 SolutionContext{all, {}, all}, allowed,
                                                 std::move(flow.system)});
            changed = true;
        }
    }
    res.identified = static_cast<int>(solved_set.size()) == n;
    return res;
}

// HTC-unidentifiability: inside every mixed component G_i, test each block
// member v against the maximal allowed set V_i \ ({v} U sib(v)). A flow value
// below |pa(v)| means no set can satisfy the HTC for v in G_i, making the
// component (and by the decomposition, G) generically infinite-to-one.
inline HtcuResult htc_unidentifiable(const MixedGraph& g) {
    auto components = g.mixed_components();
    for (std::size_t i = 0; i < components.size(); ++i) {
        const MixedGraph& gi = components[i].graph;
        for (Vertex orig : components[i].c_set) {
            const Vertex v = components[i].to_local(orig);
            VertexSet allowed =
                vset::minus(gi.all_vertices(), vset::unite(VertexSet{v}, gi.siblings(v)));
            MaxFlowResult flow = max_flow(build_flow_network(gi, allowed, v));
            if (flow.value < static_cast<int>(gi.parents(v).size()))
                return HtcuResult{true, HtcuWitness{static_cast<int>(i) + 1, orig}};
        }
    }
    return HtcuResult{false, std::nullopt};
}

// Ancestral-decomposition identifiability test. Per unsolved node v:
//   S  = An(v) U sib(An(v))
//   A  = S /\ (SolvedNodes U (V \ htr(v))) \ ({v} U sib(v))
// first try the mixed component of G_{An({v} U A)} containing v, then the
// mixed component of G_{An({v})}; in both, A is restricted to the component
// and the component's source nodes are added. htr is computed once in the
// full graph; the component restriction supplies the local view.
inline SolveResult ancestral_identifiable(const MixedGraph& g) {
    const int n = g.vertex_count();
    const VertexSet all = g.all_vertices();
    SolveResult res;
    std::vector<char> solved(n + 1, 0);
    VertexSet solved_set;
    for (Vertex v = 1; v <= n; ++v) {
        if (g.parents(v).empty()) {
            solved[v] = 1;
            solved_set.push_back(v);
            res.solutions.push_back(
                NodeSolution{v, SolutionPhase::baseline, SolutionContext{all, {}, all}, {}, {}});
        }
    }
    std::vector<VertexSet> htr(n + 1);
    for (Vertex v = 1; v <= n; ++v) htr[v] = g.half_trek_reachable(v);

    bool changed = true;
    while (changed && static_cast<int>(solved_set.size()) < n) {
        changed = false;
        ++res.sweeps;
        for (Vertex v = 1; v <= n; ++v) {
            if (solved[v]) continue;
            const VertexSet anc_v = g.ancestors({v});
            const VertexSet s_set = vset::unite(anc_v, detail::siblings_of_set(g, anc_v));
            VertexSet a_base =
                vset::intersect(s_set, vset::unite(solved_set, vset::minus(all, htr[v])));
            a_base = vset::minus(a_base, vset::unite(VertexSet{v}, g.siblings(v)));

            VertexSet anc_ext = g.ancestors(vset::unite(VertexSet{v}, a_base));
            auto sol = detail::try_component_solve(g, v, a_base, anc_ext,
                                                   SolutionPhase::extended_ancestral);
            if (!sol)
                sol = detail::try_component_solve(g, v, a_base, anc_v,
                                                  SolutionPhase::plain_ancestral);
            if (!sol) continue;
            solved[v] = 1;
            solved_set.insert(std::lower_bound(solved_set.begin(), solved_set.end(), v), v);
            res.solutions.push_back(std::move(*sol));
            changed = true;
        }
    }
    res.identified = static_cast<int>(solved_set.size()) == n;
    return res;
}

inline IdReport classify(const MixedGraph& g) {
    IdReport report;
    HtcuResult htcu = htc_unidentifiable(g);
    report.htcu = htcu.unidentifiable;
    report.htcu_witness = htcu.witness;
    report.htci_plain = htc_identifiable(g).identified;
    SolveResult alg1 = ancestral_identifiable(g);
    report.alg1 = alg1.identified;
    if (alg1.identified) report.certificate = std::move(alg1.solutions);
    report.status = report.alg1    ? GraphStatus::generically_identifiable
                    : report.htcu ? GraphStatus::generically_unidentifiable
                                  : GraphStatus::inconclusive;
    return report;
}

// Re-validates a certificate against the definitions: each solution's system
// must be a genuine no-sided-intersection half-trek system onto pa(v) inside
// its recorded context graph, the allowed set must avoid {v} U sib(v) and
// contain the sources, and any source that is half-trek reachable from v in
// the context must be either solved earlier or a source node of the context.
// Also checks the solve order covers every vertex exactly once.
inline bool validate_certificate(const MixedGraph& g, const std::vector<NodeSolution>& cert) {
    const int n = g.vertex_count();
    if (static_cast<int>(cert.size()) != n) return false;
    std::vector<char> seen(n + 1, 0);

    for (const NodeSolution& ns : cert) {
        if (ns.v < 1 || ns.v > n || seen[ns.v]) return false;
        if (vset::contains(ns.allowed, ns.v)) return false;
        if (!vset::intersect(ns.allowed, g.siblings(ns.v)).empty()) return false;

        // Rebuild the context graph and map the certificate into it.
        const bool component_phase = ns.phase != SolutionPhase::baseline;
        std::optional<detail::ContextGraph> ctx;
        if (component_phase) {
            ctx = detail::component_context(g, ns.context.ancestral_set, ns.v);
            if (ctx->c_set != ns.context.c_set || ctx->vertices != ns.context.vertices)
                return false;
            if (!vset::is_subset(ns.allowed, ctx->vertices)) return false;
        }
        auto to_local = [&](Vertex x) { return component_phase ? ctx->to_local(x) : x; };
        const MixedGraph& cg = component_phase ? ctx->graph : g;

        const Vertex lv = to_local(ns.v);
        HalfTrekSystem local_system;
        for (const HalfTrek& ht : ns.system.half_treks) {
            HalfTrek mapped;
            mapped.source = to_local(ht.source);
            mapped.starts_bidirected = ht.starts_bidirected;
            for (Vertex r : ht.right) mapped.right.push_back(to_local(r));
            local_system.half_treks.push_back(std::move(mapped));
        }
        if (!is_valid_half_trek_system(cg, local_system, cg.parents(lv))) return false;

        const VertexSet htr_local = cg.half_trek_reachable(lv);
        for (const HalfTrek& ht : ns.system.half_treks) {
            if (!vset::contains(ns.allowed, ht.source)) return false;
            if (!vset::contains(htr_local, to_local(ht.source))) continue;
            const bool context_source = cg.parents(to_local(ht.source)).empty();
            if (!seen[ht.source] && !context_source) return false;
        }
        seen[ns.v] = 1;
    }
    return true;
}

}  // namespace trekid
