#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "trekid/graphgen.hpp"
#include "trekid/identify.hpp"
#include "trekid/rng.hpp"

namespace trekid {

struct SimConfig {
    std::vector<int> n_values{6, 8, 10, 12};
    std::vector<double> p_values{0.1, 0.2, 0.3};
    std::vector<double> q_values{0.2, 0.3, 0.4, 0.5, 0.6};
    int target_count = 1000;        // inconclusive graphs per cell
    std::uint64_t master_seed = 0;
    int workers = 1;
    long long max_attempts = 0;     // per cell; 0 means 500 * target_count
};

// One experiment cell. Screening counts are disjoint:
// htci + htcu + inconclusive = generated, and every inconclusive graph up to
// the stopping attempt is retained, so inconclusive equals the retained
// count. a = alg1_yes / inconclusive.
struct SimRecord {
    int n = 0;
    double p = 0.0;
    double q = 0.0;
    std::uint64_t seed = 0;
    long long generated = 0;
    long long htci = 0;
    long long htcu = 0;
    long long inconclusive = 0;
    long long alg1_yes = 0;
    double a = std::numeric_limits<double>::quiet_NaN();
    bool budget_exhausted = false;
};

struct AggregateRecord {
    int n = 0;
    double q = 0.0;
    double b = std::numeric_limits<double>::quiet_NaN();  // mean of a over the p grid
};

struct CellResult {
    SimRecord record;
    std::vector<MixedGraph> graphs;   // retained inconclusive graphs, in sequence order
    std::vector<char> alg1_flags;     // per retained graph
};

namespace detail {

struct Attempt {
    std::optional<MixedGraph> graph;  // kept only for inconclusive graphs
    int cls = 0;                      // 0 htci, 1 htcu, 2 inconclusive/no, 3 inconclusive/yes
};

// Classification of the idx-th graph of a cell is a pure function of
// (master_seed, cell, idx); this is what makes worker counts irrelevant to
// the results.
inline Attempt evaluate_attempt(int n, double p, double q, std::uint64_t master, long long idx) {
    const std::uint64_t seed = substream_seed(master, n, p, q, static_cast<std::uint64_t>(idx));
    Rng rng(seed);
    MixedGraph g = random_mixed_graph(GenConfig{n, p, q, seed}, rng);
    if (htc_identifiable(g).identified) return Attempt{std::nullopt, 0};
    if (htc_unidentifiable(g).unidentifiable) return Attempt{std::nullopt, 1};
    const bool yes = ancestral_identifiable(g).identified;
    return Attempt{std::move(g), yes ? 3 : 2};
}

inline void evaluate_block(int n, double p, double q, std::uint64_t master, long long base,
                           std::vector<Attempt>& results, int workers) {
    const long long count = static_cast<long long>(results.size());
    if (workers <= 1) {
        for (long long k = 0; k < count; ++k) results[k] = evaluate_attempt(n, p, q, master, base + k);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (long long k = t; k < count; k += workers)
                    results[k] = evaluate_attempt(n, p, q, master, base + k);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Draw graphs for one cell until `target_count` HTC-inconclusive ones are
// retained or the attempt budget runs out (budget_exhausted flags the partial
// cell). Attempts are evaluated in fixed-size blocks and tallied in sequence
// order, so the outcome is byte-identical for any worker count.
inline CellResult find_inconclusive(int n, double p, double q, int target_count,
                                    std::uint64_t master_seed, int workers = 1,
                                    long long max_attempts = 0) {
    if (max_attempts <= 0) max_attempts = 500LL * target_count;
    if (workers < 1) workers = 1;
    constexpr long long kBlock = 256;

    CellResult out;
    out.record.n = n;
    out.record.p = p;
    out.record.q = q;
    out.record.seed = master_seed;

    long long next = 0;
    bool done = false;
    while (!done && next < max_attempts) {
        const long long count = std::min(kBlock, max_attempts - next);
        std::vector<detail::Attempt> results(count);
        detail::evaluate_block(n, p, q, master_seed, next, results, workers);
        for (long long k = 0; k < count && !done; ++k) {
            detail::Attempt& r = results[k];
            ++out.record.generated;
            if (r.cls == 0) {
                ++out.record.htci;
            } else if (r.cls == 1) {
                ++out.record.htcu;
            } else {
                ++out.record.inconclusive;
                if (r.cls == 3) ++out.record.alg1_yes;
                out.graphs.push_back(std::move(*r.graph));
                out.alg1_flags.push_back(r.cls == 3 ? 1 : 0);
                if (out.record.inconclusive == target_count) done = true;
            }
        }
        next += count;
    }
    out.record.budget_exhausted = !done;
    if (out.record.inconclusive > 0)
        out.record.a =
            static_cast<double>(out.record.alg1_yes) / static_cast<double>(out.record.inconclusive);
    return out;
}

struct ExperimentResult {
    std::vector<SimRecord> cells;          // grid order: n, then p, then q
    std::vector<AggregateRecord> aggregate;  // grid order: n, then q
};

// The full experiment: per cell, screen for inconclusive graphs and apply the
// ancestral algorithm; aggregate b_{n,q} as the mean of a_{n,p,q} over the p
// grid. An optional sink receives each cell's full result (e.g. to persist
// the retained graphs).
inline ExperimentResult run_experiment(
    const SimConfig& cfg, const std::function<void(const CellResult&)>& on_cell = nullptr) {
    ExperimentResult res;
    for (int n : cfg.n_values) {
        for (double p : cfg.p_values) {
            for (double q : cfg.q_values) {
                CellResult cell = find_inconclusive(n, p, q, cfg.target_count, cfg.master_seed,
                                                    cfg.workers, cfg.max_attempts);
                if (on_cell) on_cell(cell);
                res.cells.push_back(cell.record);
            }
        }
    }
    for (int n : cfg.n_values) {
        for (double q : cfg.q_values) {
            double sum = 0.0;
            int count = 0;
            for (const SimRecord& rec : res.cells) {
                if (rec.n == n && rec.q == q) {
                    sum += rec.a;
                    ++count;
                }
            }
            res.aggregate.push_back(
                AggregateRecord{n, q, count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN()});
        }
    }
    return res;
}

namespace detail {

inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace detail

inline std::string cells_csv(const std::vector<SimRecord>& records) {
    std::string out = "n,p,q,seed,generated,htci,htcu,inconclusive,alg1_yes,a\n";
    for (const SimRecord& r : records) {
        out += std::to_string(r.n) + ',' + detail::format_number(r.p) + ',' +
               detail::format_number(r.q) + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.generated) + ',' + std::to_string(r.htci) + ',' +
               std::to_string(r.htcu) + ',' + std::to_string(r.inconclusive) + ',' +
               std::to_string(r.alg1_yes) + ',' + detail::format_number(r.a) + '\n';
    }
    return out;
}

inline std::string aggregate_csv(const std::vector<AggregateRecord>& records) {
    std::string out = "n,q,b\n";
    for (const AggregateRecord& r : records)
        out += std::to_string(r.n) + ',' + detail::format_number(r.q) + ',' +
               detail::format_number(r.b) + '\n';
    return out;
}

// gnuplot-ready data: one block of "q b" rows per n, blocks separated by
// blank lines (gnuplot `index` convention).
inline std::string aggregate_gnuplot(const std::vector<AggregateRecord>& records) {
    std::string out;
    int current_n = std::numeric_limits<int>::min();
    bool first = true;
    for (const AggregateRecord& r : records) {
        if (r.n != current_n) {
            if (!first) out += '\n';
            out += "# n = " + std::to_string(r.n) + '\n';
            current_n = r.n;
            first = false;
        }
        out += detail::format_number(r.q) + ' ' + detail::format_number(r.b) + '\n';
    }
    return out;
}

}  // namespace trekid
