#include "trekid/sim.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace trekid;

TEST(FindInconclusive, RetainedGraphsReclassifyAsInconclusive) {
    CellResult cell = find_inconclusive(6, 0.1, 0.2, 10, 2024);
    EXPECT_FALSE(cell.record.budget_exhausted);
    EXPECT_EQ(cell.record.inconclusive, 10);
    ASSERT_EQ(cell.graphs.size(), 10u);
    for (const MixedGraph& g : cell.graphs) {
        EXPECT_FALSE(htc_identifiable(g).identified);
        EXPECT_FALSE(htc_unidentifiable(g).unidentifiable);
    }
    EXPECT_EQ(cell.record.htci + cell.record.htcu + cell.record.inconclusive,
              cell.record.generated);
}

TEST(FindInconclusive, TwoVertexCellsExhaustTheBudget) {
    // No 2-vertex mixed graph is HTC-inconclusive, so the budget always runs out.
    for (const MixedGraph& g : fixtures::all_mixed_graphs(2)) {
        bool inconclusive =
            !htc_identifiable(g).identified && !htc_unidentifiable(g).unidentifiable;
        ASSERT_FALSE(inconclusive);
    }
    CellResult cell = find_inconclusive(2, 0.5, 0.5, 1, 7, 1, 200);
    EXPECT_TRUE(cell.record.budget_exhausted);
    EXPECT_EQ(cell.record.generated, 200);
    EXPECT_EQ(cell.record.inconclusive, 0);
    EXPECT_TRUE(std::isnan(cell.record.a));
}

TEST(FindInconclusive, WorkerCountDoesNotChangeResults) {
    CellResult sequential = find_inconclusive(6, 0.2, 0.4, 25, 99, 1);
    for (int workers : {2, 4, 7}) {
        CellResult parallel = find_inconclusive(6, 0.2, 0.4, 25, 99, workers);
        EXPECT_EQ(sequential.record.generated, parallel.record.generated);
        EXPECT_EQ(sequential.record.htci, parallel.record.htci);
        EXPECT_EQ(sequential.record.htcu, parallel.record.htcu);
        EXPECT_EQ(sequential.record.alg1_yes, parallel.record.alg1_yes);
        EXPECT_EQ(sequential.record.a, parallel.record.a);
        ASSERT_EQ(sequential.graphs.size(), parallel.graphs.size());
        for (std::size_t i = 0; i < sequential.graphs.size(); ++i)
            EXPECT_EQ(sequential.graphs[i], parallel.graphs[i]);
    }
}

TEST(FindInconclusive, RerunFromPersistedCorpusAgreesExactly) {
    CellResult cell = find_inconclusive(6, 0.2, 0.5, 20, 31337);
    long long yes = 0;
    for (const MixedGraph& g : cell.graphs)
        if (ancestral_identifiable(g).identified) ++yes;
    EXPECT_EQ(yes, cell.record.alg1_yes);
    EXPECT_EQ(static_cast<double>(yes) / static_cast<double>(cell.graphs.size()), cell.record.a);
}

TEST(RunExperiment, AggregateIsTheMeanOverThePGrid) {
    SimConfig cfg;
    cfg.n_values = {6};
    cfg.p_values = {0.1, 0.2, 0.3};
    cfg.q_values = {0.4};
    cfg.target_count = 5;
    cfg.master_seed = 11;
    ExperimentResult res = run_experiment(cfg);
    ASSERT_EQ(res.cells.size(), 3u);
    ASSERT_EQ(res.aggregate.size(), 1u);
    double expect = (res.cells[0].a + res.cells[1].a + res.cells[2].a) / 3.0;
    EXPECT_DOUBLE_EQ(res.aggregate[0].b, expect);
    EXPECT_EQ(res.aggregate[0].n, 6);
    EXPECT_EQ(res.aggregate[0].q, 0.4);
}

TEST(RunExperiment, CsvOutputsAreStable) {
    SimConfig cfg;
    cfg.n_values = {6};
    cfg.p_values = {0.1};
    cfg.q_values = {0.3, 0.5};
    cfg.target_count = 4;
    cfg.master_seed = 5;
    ExperimentResult a = run_experiment(cfg);
    cfg.workers = 3;
    ExperimentResult b = run_experiment(cfg);
    EXPECT_EQ(cells_csv(a.cells), cells_csv(b.cells));
    EXPECT_EQ(aggregate_csv(a.aggregate), aggregate_csv(b.aggregate));
    EXPECT_EQ(aggregate_gnuplot(a.aggregate), aggregate_gnuplot(b.aggregate));

    std::string csv = cells_csv(a.cells);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "n,p,q,seed,generated,htci,htcu,inconclusive,alg1_yes,a");
}
