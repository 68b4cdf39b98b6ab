#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "trekid/identify.hpp"
#include "trekid/mixed_graph.hpp"
#include "trekid/rng.hpp"

namespace trekid {

using Covariance = Eigen::MatrixXd;

// Model parameters for a graph on n vertices: lambda(v-1, w-1) is the
// coefficient on the edge v -> w (zero off the directed support), omega is
// symmetric positive definite with off-diagonal support on the bidirected
// edges.
struct Parameters {
    Eigen::MatrixXd lambda;
    Eigen::MatrixXd omega;
};

struct SampleConfig {
    double lambda_min = 0.5, lambda_max = 1.5;
    double omega_min = 0.2, omega_max = 0.8;
    double diag_min = 1.0, diag_max = 2.0;
};

// Random parameters supported on the graph. Off-diagonal draws get a fair
// sign; diagonals are the absolute row sum plus a uniform[diag_min, diag_max]
// margin, which makes omega strictly diagonally dominant and hence positive
// definite. Draw order is pinned (directed edges, bidirected edges,
// diagonals, each in sorted order), so a seed determines the parameters.
inline Parameters sample_parameters(const MixedGraph& g, Rng& rng, const SampleConfig& cfg = {}) {
    const int n = g.vertex_count();
    Parameters out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
    for (const auto& [v, w] : g.directed_edges())
        out.lambda(v - 1, w - 1) = rng.signed_uniform(cfg.lambda_min, cfg.lambda_max);
    for (const auto& [v, w] : g.bidirected_edges()) {
        const double x = rng.signed_uniform(cfg.omega_min, cfg.omega_max);
        out.omega(v - 1, w - 1) = x;
        out.omega(w - 1, v - 1) = x;
    }
    for (int v = 0; v < n; ++v)
        out.omega(v, v) = out.omega.row(v).cwiseAbs().sum() + rng.uniform(cfg.diag_min, cfg.diag_max);
    return out;
}

// Throws NumericError unless the parameters respect the graph's support,
// omega is symmetric, and omega is positive definite (checked by a Cholesky
// factorization).
inline void validate_parameters(const MixedGraph& g, const Parameters& p) {
    const int n = g.vertex_count();
    if (p.lambda.rows() != n || p.lambda.cols() != n || p.omega.rows() != n || p.omega.cols() != n)
        throw NumericError("parameter matrices must be " + std::to_string(n) + "x" + std::to_string(n));
    for (int v = 1; v <= n; ++v) {
        for (int w = 1; w <= n; ++w) {
            if (p.lambda(v - 1, w - 1) != 0.0 && !g.has_directed_edge(v, w))
                throw NumericError("lambda entry off the directed support at (" + std::to_string(v) +
                                   "," + std::to_string(w) + ")");
            if (v != w && p.omega(v - 1, w - 1) != 0.0 && !g.has_bidirected_edge(v, w))
                throw NumericError("omega entry off the bidirected support at (" + std::to_string(v) +
                                   "," + std::to_string(w) + ")");
        }
    }
    if (!p.omega.isApprox(p.omega.transpose()))
        throw NumericError("omega is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(p.omega);
    if (llt.info() != Eigen::Success)
        throw NumericError("omega is not positive definite");
}

namespace detail {

// (I - Lambda)^{-1}, computed by a unit-triangular solve after permuting to
// topological order; acyclicity makes I - Lambda_topo unit upper triangular.
inline Eigen::MatrixXd inverse_i_minus_lambda(const MixedGraph& g, const Eigen::MatrixXd& lambda) {
    const int n = g.vertex_count();
    const auto& topo = g.topological_order();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) m(i, j) = -lambda(topo[i] - 1, topo[j] - 1);
    Eigen::MatrixXd k_topo =
        m.triangularView<Eigen::UnitUpper>().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(topo[i] - 1, topo[j] - 1) = k_topo(i, j);
    return k;
}

inline Eigen::VectorXd vech(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd out(n * (n + 1) / 2);
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out(k++) = m(i, j);
    return out;
}

}  // namespace detail

// Sigma = (I - Lambda)^{-T} Omega (I - Lambda)^{-1}, evaluated with two
// triangular solves in topological order; no explicit inverse.
inline Covariance covariance(const MixedGraph& g, const Parameters& p) {
    const int n = g.vertex_count();
    const auto& topo = g.topological_order();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd omega_topo(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) m(i, j) = -p.lambda(topo[i] - 1, topo[j] - 1);
            omega_topo(i, j) = p.omega(topo[i] - 1, topo[j] - 1);
        }
    }
    // Z = M^{-T} Omega, then Sigma^T solves M^T Sigma^T = Z^T.
    Eigen::MatrixXd z = m.transpose().triangularView<Eigen::UnitLower>().solve(omega_topo);
    Eigen::MatrixXd sigma_topo =
        m.transpose().triangularView<Eigen::UnitLower>().solve(z.transpose()).transpose();
    Covariance sigma(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sigma(topo[i] - 1, topo[j] - 1) = sigma_topo(i, j);
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    if (!sigma.allFinite()) throw NumericError("covariance evaluation produced non-finite entries");
    return sigma;
}

// A trek: two directed paths with a common top node, or joined by a
// bidirected bridge. `left` runs from the top down to the source, `right`
// from the top down to the target; for a bridge trek the fronts are the two
// bridge endpoints.
struct Trek {
    std::vector<Vertex> left;
    std::vector<Vertex> right;
    bool has_bridge = false;

    friend bool operator==(const Trek&, const Trek&) = default;
};

// All treks between v and w, by pairing every directed path into v with every
// directed path into w whose starts coincide (top form) or are joined by a
// bidirected edge (bridge form). Acyclicity keeps the path count finite; the
// limit guards against blowup.
inline std::vector<Trek> enumerate_treks(const MixedGraph& g, Vertex v, Vertex w,
                                         int max_vertices = 10) {
    if (g.vertex_count() > max_vertices)
        throw InstanceTooLargeError("trek enumeration limited to " + std::to_string(max_vertices) +
                                    " vertices, got " + std::to_string(g.vertex_count()));
    // Directed paths ending at `end`, each stored from its start down to end.
    auto paths_into = [&g](Vertex end) {
        std::vector<std::vector<Vertex>> out;
        std::vector<Vertex> path{end};
        auto ascend = [&](auto&& self, Vertex at) -> void {
            out.emplace_back(path.rbegin(), path.rend());
            for (Vertex parent : g.parents(at)) {
                path.push_back(parent);
                self(self, parent);
                path.pop_back();
            }
        };
        ascend(ascend, end);
        return out;
    };
    const auto left_paths = paths_into(v);
    const auto right_paths = paths_into(w);
    std::vector<Trek> treks;
    for (const auto& l : left_paths) {
        for (const auto& r : right_paths) {
            if (l.front() == r.front())
                treks.push_back(Trek{l, r, false});
            else if (g.has_bidirected_edge(l.front(), r.front()))
                treks.push_back(Trek{l, r, true});
        }
    }
    return treks;
}

// omega factor of the top/bridge times the lambda product over all directed
// edges on both sides.
inline double trek_monomial(const Parameters& p, const Trek& trek) {
    double value = p.omega(trek.left.front() - 1, trek.right.front() - 1);
    for (std::size_t i = 0; i + 1 < trek.left.size(); ++i)
        value *= p.lambda(trek.left[i] - 1, trek.left[i + 1] - 1);
    for (std::size_t i = 0; i + 1 < trek.right.size(); ++i)
        value *= p.lambda(trek.right[i] - 1, trek.right[i + 1] - 1);
    return value;
}

// Trek rule: Sigma_vw as the sum of trek monomials over all treks from v to
// w. Enumeration-backed; intended as an independent oracle for covariance().
inline Covariance trek_rule_covariance(const MixedGraph& g, const Parameters& p,
                                       int max_vertices = 10) {
    const int n = g.vertex_count();
    Covariance sigma = Covariance::Zero(n, n);
    for (Vertex v = 1; v <= n; ++v) {
        for (Vertex w = v; w <= n; ++w) {
            double sum = 0.0;
            for (const Trek& trek : enumerate_treks(g, v, w, max_vertices))
                sum += trek_monomial(p, trek);
            sigma(v - 1, w - 1) = sum;
            sigma(w - 1, v - 1) = sum;
        }
    }
    return sigma;
}

// Certificate-driven parameter recovery. Per node v in certificate order,
// the half-trek system's sources y_1..y_m yield the linear system
// A Lambda_{pa(v),v} = b with
//   A_ij = [(I-Lambda)^T Sigma]_{y_i p_j}  when y_i is half-trek reachable
//          from v in the context graph (needs Lambda's y_i-row, recovered
//          earlier), and A_ij = Sigma_{y_i p_j} otherwise; b analogously with
//   column v. Supported contexts are the whole graph and ancestral induced
// subgraphs, whose covariances are plain submatrices of Sigma; solutions
// routed through a Tian component of a proper ancestral set are rejected
// because their covariance is not a submatrix.
inline Parameters recover_parameters(const MixedGraph& g, const Covariance& sigma,
                                     const std::vector<NodeSolution>& cert) {
    const int n = g.vertex_count();
    if (sigma.rows() != n || sigma.cols() != n)
        throw NumericError("sigma must be " + std::to_string(n) + "x" + std::to_string(n));
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(n, n);
    std::vector<char> recovered(n + 1, 0);

    for (const NodeSolution& ns : cert) {
        const Vertex v = ns.v;
        const VertexSet& pa = g.parents(v);
        if (pa.empty()) {
            recovered[v] = 1;
            continue;
        }
        if (ns.phase == SolutionPhase::extended_ancestral)
            throw UnsupportedCertificatePhaseError(
                "node " + std::to_string(v) +
                " was solved in a Tian component of a proper ancestral set; its covariance is not "
                "a submatrix of sigma");

        VertexSet htr_ctx;
        if (ns.phase == SolutionPhase::baseline) {
            htr_ctx = g.half_trek_reachable(v);
        } else {
            InducedSubgraph sub = g.induced_subgraph(g.ancestors({v}));
            for (Vertex x : sub.graph.half_trek_reachable(sub.to_local(v)))
                htr_ctx.push_back(sub.to_original(x));
        }

        const int m = static_cast<int>(pa.size());
        if (static_cast<int>(ns.system.half_treks.size()) != m)
            throw UnsupportedCertificatePhaseError("certificate system size mismatch at node " +
                                                   std::to_string(v));
        Eigen::MatrixXd a(m, m);
        Eigen::VectorXd b(m);
        for (int i = 0; i < m; ++i) {
            const Vertex y = ns.system.half_treks[i].source;
            const bool reachable = vset::contains(htr_ctx, y);
            if (reachable && !recovered[y])
                throw UnsupportedCertificatePhaseError(
                    "certificate uses unrecovered half-trek-reachable source " + std::to_string(y) +
                    " at node " + std::to_string(v));
            for (int j = 0; j < m; ++j) {
                const Vertex p = pa[j];
                double val = sigma(y - 1, p - 1);
                if (reachable)
                    for (Vertex u : g.parents(y)) val -= lambda(u - 1, y - 1) * sigma(u - 1, p - 1);
                a(i, j) = val;
            }
            double val = sigma(y - 1, v - 1);
            if (reachable)
                for (Vertex u : g.parents(y)) val -= lambda(u - 1, y - 1) * sigma(u - 1, v - 1);
            b(i) = val;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible())
            throw SingularSystemError("singular recovery system at node " + std::to_string(v) +
                                      "; resample parameters");
        Eigen::VectorXd x = lu.solve(b);
        for (int j = 0; j < m; ++j) lambda(pa[j] - 1, v - 1) = x(j);
        recovered[v] = 1;
    }

    for (Vertex v = 1; v <= n; ++v)
        if (!recovered[v]) throw Error("certificate does not cover vertex " + std::to_string(v));

    Eigen::MatrixXd imb = Eigen::MatrixXd::Identity(n, n) - lambda;
    Eigen::MatrixXd omega = imb.transpose() * sigma * imb;
    omega = 0.5 * (omega + omega.transpose()).eval();
    return Parameters{std::move(lambda), std::move(omega)};
}

// Jacobian of the parametrization (Lambda, Omega) -> vech(Sigma) at a point.
// With K = (I - Lambda)^{-1}:
//   lambda direction E_vw:          dSigma = Sigma E_vw K + (Sigma E_vw K)^T
//   omega direction E_vw + E_wv:    dSigma = K^T (E_vw + E_wv) K
//   omega diagonal direction E_vv:  dSigma = K^T E_vv K
// Columns are ordered: directed edges, bidirected edges, then diagonals, each
// in sorted order.
inline Eigen::MatrixXd parametrization_jacobian(const MixedGraph& g, const Parameters& p) {
    const int n = g.vertex_count();
    const Eigen::MatrixXd k = detail::inverse_i_minus_lambda(g, p.lambda);
    const Eigen::MatrixXd sigma = covariance(g, p);
    const int cols = static_cast<int>(g.directed_edges().size() + g.bidirected_edges().size()) + n;
    Eigen::MatrixXd jac(n * (n + 1) / 2, cols);
    int col = 0;
    for (const auto& [v, w] : g.directed_edges()) {
        Eigen::MatrixXd m = sigma.col(v - 1) * k.row(w - 1);
        jac.col(col++) = detail::vech(m + m.transpose());
    }
    for (const auto& [v, w] : g.bidirected_edges()) {
        Eigen::MatrixXd m = k.row(v - 1).transpose() * k.row(w - 1);
        jac.col(col++) = detail::vech(m + m.transpose());
    }
    for (Vertex v = 1; v <= n; ++v) {
        Eigen::MatrixXd m = k.row(v - 1).transpose() * k.row(v - 1);
        jac.col(col++) = detail::vech(m);
    }
    if (!jac.allFinite()) throw NumericError("jacobian evaluation produced non-finite entries");
    return jac;
}

// Same Jacobian by central finite differences; the cross-check for the
// analytic formula.
inline Eigen::MatrixXd finite_difference_jacobian(const MixedGraph& g, const Parameters& p,
                                                  double step = 1e-6) {
    const int n = g.vertex_count();
    const int cols = static_cast<int>(g.directed_edges().size() + g.bidirected_edges().size()) + n;
    Eigen::MatrixXd jac(n * (n + 1) / 2, cols);
    auto column = [&](auto&& perturb, int col) {
        Parameters hi = p, lo = p;
        perturb(hi, step);
        perturb(lo, -step);
        jac.col(col) =
            (detail::vech(covariance(g, hi)) - detail::vech(covariance(g, lo))) / (2.0 * step);
    };
    int col = 0;
    for (const auto& [v, w] : g.directed_edges())
        column([v = v, w = w](Parameters& q, double h) { q.lambda(v - 1, w - 1) += h; }, col++);
    for (const auto& [v, w] : g.bidirected_edges())
        column(
            [v = v, w = w](Parameters& q, double h) {
                q.omega(v - 1, w - 1) += h;
                q.omega(w - 1, v - 1) += h;
            },
            col++);
    for (Vertex v = 1; v <= n; ++v)
        column([v](Parameters& q, double h) { q.omega(v - 1, v - 1) += h; }, col++);
    return jac;
}

struct JacobianRankReport {
    int rank = 0;
    int parameter_count = 0;   // |D| + bidirected pairs + n
    int target_dimension = 0;  // n(n+1)/2

    bool full_column_rank() const { return rank == parameter_count; }
};

// Numeric local-identifiability oracle: the rank of the parametrization
// Jacobian at the given point, from singular values with the dimensionless
// threshold sigma_max * 1e-9 * max(rows, cols).
inline JacobianRankReport jacobian_rank(const MixedGraph& g, const Parameters& p) {
    const Eigen::MatrixXd jac = parametrization_jacobian(g, p);
    JacobianRankReport report;
    report.parameter_count = static_cast<int>(jac.cols());
    report.target_dimension = static_cast<int>(jac.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return report;
    const double tol = sv(0) * 1e-9 * static_cast<double>(std::max(jac.rows(), jac.cols()));
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol && sv(i) > 0.0) ++report.rank;
    return report;
}

}  // namespace trekid
