#include "trekid/numeric.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace trekid;
using fixtures::bow;
using fixtures::fig1a;

namespace {

Parameters chain2_params() {
    Parameters p{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)};
    p.lambda(0, 1) = 2.0;
    return p;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// |difference| relative to the true value, floored at 1 so zero entries are
// held to the same absolute scale.
double normalized_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < want.rows(); ++i)
        for (Eigen::Index j = 0; j < want.cols(); ++j)
            worst = std::max(worst, std::abs(got(i, j) - want(i, j)) /
                                        std::max(1.0, std::abs(want(i, j))));
    return worst;
}

}  // namespace

TEST(SampleParameters, SupportAndDeterminism) {
    MixedGraph g = fig1a();
    Rng rng1(5), rng2(5);
    Parameters a = sample_parameters(g, rng1);
    Parameters b = sample_parameters(g, rng2);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.omega, b.omega);
    validate_parameters(g, a);
    for (const auto& [v, w] : g.directed_edges()) {
        double mag = std::abs(a.lambda(v - 1, w - 1));
        EXPECT_GE(mag, 0.5);
        EXPECT_LE(mag, 1.5);
    }
    for (const auto& [v, w] : g.bidirected_edges()) {
        double mag = std::abs(a.omega(v - 1, w - 1));
        EXPECT_GE(mag, 0.2);
        EXPECT_LE(mag, 0.8);
        EXPECT_EQ(a.omega(v - 1, w - 1), a.omega(w - 1, v - 1));
    }
}

TEST(SampleParameters, DagGivesDiagonalOmega) {
    MixedGraph g(3, {{1, 2}, {2, 3}}, {});
    Rng rng(9);
    Parameters p = sample_parameters(g, rng);
    EXPECT_TRUE(p.omega.isDiagonal());
}

TEST(Covariance, HandExpandedChain) {
    Covariance sigma = covariance(fixtures::chain2(), chain2_params());
    Eigen::MatrixXd want(2, 2);
    want << 1, 2, 2, 5;
    EXPECT_LT(max_abs_diff(sigma, want), 1e-12);
}

TEST(Covariance, ZeroLambdaGivesOmega) {
    MixedGraph g = fig1a();
    Rng rng(17);
    Parameters p = sample_parameters(g, rng);
    p.lambda.setZero();
    EXPECT_LT(max_abs_diff(covariance(g, p), p.omega), 1e-12);
}

TEST(Covariance, SymmetricPositiveDefinite) {
    Rng rng(55);
    for (int iter = 0; iter < 40; ++iter) {
        int n = rng.uniform_int(2, 9);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.3, 0.4, rng);
        Parameters p = sample_parameters(g, rng);
        Covariance sigma = covariance(g, p);
        EXPECT_TRUE(sigma.isApprox(sigma.transpose()));
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        EXPECT_EQ(llt.info(), Eigen::Success);
    }
}

TEST(EnumerateTreks, ChainExamples) {
    MixedGraph g(3, {{1, 2}, {2, 3}}, {});
    EXPECT_EQ(enumerate_treks(g, 1, 3).size(), 1u);  // only 1 -> 2 -> 3
    EXPECT_EQ(enumerate_treks(g, 3, 3).size(), 3u);  // tops 3, 2, 1
    MixedGraph h(3, {{1, 2}}, {});
    EXPECT_TRUE(enumerate_treks(h, 1, 3).empty());
    MixedGraph big(11, {}, {});
    EXPECT_THROW(enumerate_treks(big, 1, 2), InstanceTooLargeError);
}

TEST(EnumerateTreks, EmptyTrekWhenSourceEqualsTarget) {
    MixedGraph g(2, {}, {});
    auto treks = enumerate_treks(g, 1, 1);
    ASSERT_EQ(treks.size(), 1u);
    EXPECT_EQ(treks[0].left, (std::vector<Vertex>{1}));
    EXPECT_EQ(treks[0].right, (std::vector<Vertex>{1}));
    EXPECT_FALSE(treks[0].has_bridge);
}

TEST(TrekRule, ChainMatches) {
    EXPECT_LT(max_abs_diff(trek_rule_covariance(fixtures::chain2(), chain2_params()),
                           covariance(fixtures::chain2(), chain2_params())),
              1e-12);
}

TEST(TrekRule, SingleBridgeTrek) {
    MixedGraph g(2, {}, {{1, 2}});
    Parameters p{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)};
    p.omega(0, 1) = p.omega(1, 0) = 0.3;
    Covariance sigma = trek_rule_covariance(g, p);
    EXPECT_DOUBLE_EQ(sigma(0, 1), 0.3);
    EXPECT_LT(max_abs_diff(sigma, covariance(g, p)), 1e-12);
}

TEST(TrekRule, MatchesMatrixFormulaOnRandomGraphs) {
    Rng rng(808);
    for (int iter = 0; iter < 60; ++iter) {
        int n = rng.uniform_int(2, 6);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.35, 0.45, rng);
        Parameters p = sample_parameters(g, rng);
        EXPECT_LT(max_abs_diff(trek_rule_covariance(g, p), covariance(g, p)), 1e-9);
    }
}

TEST(AncestralSubmatrix, InducedCovarianceEqualsSubmatrix) {
    Rng rng(60601);
    for (int iter = 0; iter < 40; ++iter) {
        int n = rng.uniform_int(3, 9);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.3, 0.4, rng);
        Parameters p = sample_parameters(g, rng);
        Covariance sigma = covariance(g, p);

        VertexSet seed;
        for (Vertex v = 1; v <= n; ++v)
            if (rng.bernoulli(0.4)) seed.push_back(v);
        if (seed.empty()) seed.push_back(rng.uniform_int(1, n));
        VertexSet anc = g.ancestors(seed);
        InducedSubgraph sub = g.induced_subgraph(anc);

        const int m = sub.graph.vertex_count();
        Parameters sp{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                sp.lambda(i, j) = p.lambda(sub.to_original(i + 1) - 1, sub.to_original(j + 1) - 1);
                sp.omega(i, j) = p.omega(sub.to_original(i + 1) - 1, sub.to_original(j + 1) - 1);
            }
        Covariance sub_sigma = covariance(sub.graph, sp);
        double worst = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                worst = std::max(worst, std::abs(sub_sigma(i, j) -
                                                 sigma(sub.to_original(i + 1) - 1,
                                                       sub.to_original(j + 1) - 1)));
        EXPECT_LT(worst, 1e-12);
    }
}

TEST(RecoverParameters, InvertsTheChainExample) {
    MixedGraph g = fixtures::chain2();
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1, 2, 2, 5;
    SolveResult cert = htc_identifiable(g);
    ASSERT_TRUE(cert.identified);
    Parameters rec = recover_parameters(g, sigma, cert.solutions);
    EXPECT_NEAR(rec.lambda(0, 1), 2.0, 1e-12);
    EXPECT_LT(max_abs_diff(rec.omega, Eigen::MatrixXd::Identity(2, 2)), 1e-12);
}

TEST(RecoverParameters, RoundTripOnFig1cRightComponent) {
    MixedGraph g = fixtures::fig1c_right();
    SolveResult cert = htc_identifiable(g);
    ASSERT_TRUE(cert.identified);
    Rng rng(321);
    Parameters p = sample_parameters(g, rng);
    Parameters rec = recover_parameters(g, covariance(g, p), cert.solutions);
    EXPECT_LT(normalized_error(rec.lambda, p.lambda), 1e-6);
    EXPECT_LT(normalized_error(rec.omega, p.omega), 1e-6);
}

TEST(RecoverParameters, RoundTripOnRandomDags) {
    Rng rng(654);
    for (int iter = 0; iter < 25; ++iter) {
        int n = rng.uniform_int(2, 8);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.0, 0.5, rng);
        SolveResult cert = htc_identifiable(g);
        ASSERT_TRUE(cert.identified);
        Parameters p = sample_parameters(g, rng);
        Parameters rec = recover_parameters(g, covariance(g, p), cert.solutions);
        EXPECT_LT(normalized_error(rec.lambda, p.lambda), 1e-8);
        EXPECT_LT(normalized_error(rec.omega, p.omega), 1e-8);
    }
}

TEST(RecoverParameters, RoundTripOnRandomHtcIdentifiableGraphs) {
    Rng rng(7777);
    int done = 0;
    while (done < 30) {
        int n = rng.uniform_int(3, 8);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.2, 0.4, rng);
        SolveResult cert = htc_identifiable(g);
        if (!cert.identified) continue;
        Parameters p = sample_parameters(g, rng);
        Parameters rec = recover_parameters(g, covariance(g, p), cert.solutions);
        EXPECT_LT(normalized_error(rec.lambda, p.lambda), 1e-6);
        EXPECT_LT(normalized_error(rec.omega, p.omega), 1e-6);
        ++done;
    }
}

TEST(RecoverParameters, RejectsTianComponentPhases) {
    MixedGraph g = fig1a();
    SolveResult cert = ancestral_identifiable(g);
    ASSERT_TRUE(cert.identified);
    bool has_extended = false;
    for (const auto& ns : cert.solutions)
        if (ns.phase == SolutionPhase::extended_ancestral) has_extended = true;
    ASSERT_TRUE(has_extended);
    Rng rng(12);
    Parameters p = sample_parameters(g, rng);
    EXPECT_THROW(recover_parameters(g, covariance(g, p), cert.solutions),
                 UnsupportedCertificatePhaseError);
}

TEST(JacobianRank, BowIsRankDeficient) {
    Rng rng(88);
    Parameters p = sample_parameters(bow(), rng);
    JacobianRankReport report = jacobian_rank(bow(), p);
    EXPECT_EQ(report.parameter_count, 4);  // 1 + 1 + 2
    EXPECT_EQ(report.target_dimension, 3);
    EXPECT_LE(report.rank, 3);
    EXPECT_FALSE(report.full_column_rank());
}

TEST(JacobianRank, SaturatedChainIsFull) {
    Rng rng(89);
    Parameters p = sample_parameters(fixtures::chain2(), rng);
    JacobianRankReport report = jacobian_rank(fixtures::chain2(), p);
    EXPECT_EQ(report.parameter_count, 3);
    EXPECT_EQ(report.rank, 3);
    EXPECT_TRUE(report.full_column_rank());
}

TEST(JacobianRank, Fig1aHasFullRankTwenty) {
    Rng rng(90);
    Parameters p = sample_parameters(fig1a(), rng);
    JacobianRankReport report = jacobian_rank(fig1a(), p);
    EXPECT_EQ(report.parameter_count, 20);  // 9 + 5 + 6
    EXPECT_EQ(report.target_dimension, 21);
    EXPECT_EQ(report.rank, 20);
}

TEST(Jacobian, AnalyticMatchesFiniteDifferences) {
    Rng rng(91);
    for (int iter = 0; iter < 20; ++iter) {
        int n = rng.uniform_int(2, 7);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.3, 0.4, rng);
        Parameters p = sample_parameters(g, rng);
        Eigen::MatrixXd analytic = parametrization_jacobian(g, p);
        Eigen::MatrixXd fd = finite_difference_jacobian(g, p);
        ASSERT_EQ(analytic.rows(), fd.rows());
        ASSERT_EQ(analytic.cols(), fd.cols());
        for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
            double denom = std::max({analytic.col(c).norm(), fd.col(c).norm(), 1e-12});
            EXPECT_LT((analytic.col(c) - fd.col(c)).norm() / denom, 1e-5);
        }
    }
}

TEST(JacobianRank, ConsistentWithClassification) {
    Rng rng(92);
    int checked = 0;
    for (int iter = 0; iter < 60; ++iter) {
        int n = rng.uniform_int(3, 7);
        MixedGraph g = fixtures::random_graph_uniform(n, 0.3, 0.4, rng);
        bool alg1 = ancestral_identifiable(g).identified;
        bool htcu = htc_unidentifiable(g).unidentifiable;
        if (!alg1 && !htcu) continue;
        bool ok = false;
        for (int draw = 0; draw < 3 && !ok; ++draw) {
            Parameters p = sample_parameters(g, rng);
            JacobianRankReport report = jacobian_rank(g, p);
            if (alg1)
                ok = report.full_column_rank();
            else
                ok = !report.full_column_rank();  // rank cannot exceed the generic rank
        }
        EXPECT_TRUE(ok);
        ++checked;
    }
    EXPECT_GT(checked, 20);
}
