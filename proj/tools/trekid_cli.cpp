// trekid: generic-identifiability toolkit for linear structural equation
// models given as acyclic mixed graphs. Subcommands: classify, decompose,
// ancestors, generate, simulate, verify.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trekid/trekid.hpp"

namespace fs = std::filesystem;
using namespace trekid;

namespace {

std::uint64_t parse_seed_string(const std::string& text) {
    try {
        std::size_t used = 0;
        std::uint64_t value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseError("invalid seed '" + text + "'");
    }
}

// --seed wins; otherwise TREKID_SEED; otherwise the fallback.
std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed_value,
                           std::uint64_t fallback) {
    if (seed_opt->count() > 0) return seed_value;
    if (const char* env = std::getenv("TREKID_SEED")) return parse_seed_string(env);
    return fallback;
}

std::string format_error_value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string join_vertices(const VertexSet& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(s[i]);
    }
    return out;
}

std::string half_trek_to_string(const HalfTrek& ht) {
    std::string out = std::to_string(ht.source);
    if (ht.starts_bidirected) out += "<->" + std::to_string(ht.right.front());
    for (std::size_t i = 1; i < ht.right.size(); ++i) out += "->" + std::to_string(ht.right[i]);
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << content;
}

void print_certificate(const std::vector<NodeSolution>& cert) {
    for (const NodeSolution& ns : cert) {
        std::cout << "  solve " << ns.v << " [" << phase_name(ns.phase) << "]";
        if (ns.phase != SolutionPhase::baseline)
            std::cout << " context An={" << join_vertices(ns.context.ancestral_set) << "} C={"
                      << join_vertices(ns.context.c_set) << "}";
        std::cout << " allowed={" << join_vertices(ns.allowed) << "}";
        if (!ns.system.half_treks.empty()) {
            std::cout << " system:";
            for (const HalfTrek& ht : ns.system.half_treks)
                std::cout << " " << half_trek_to_string(ht);
        }
        std::cout << "\n";
    }
}

int run_classify(const std::string& path, bool as_json, bool with_certificate) {
    MixedGraph g = load_graph_file(path);
    IdReport report = classify(g);
    if (as_json) {
        std::cout << report_to_json(report).dump(2) << "\n";
        return 0;
    }
    std::cout << "status: " << status_name(report.status) << "\n";
    std::cout << "htci_plain: " << (report.htci_plain ? "true" : "false") << "\n";
    std::cout << "htcu: " << (report.htcu ? "true" : "false") << "\n";
    std::cout << "alg1: " << (report.alg1 ? "true" : "false") << "\n";
    if (report.htcu_witness)
        std::cout << "htcu_witness: component " << report.htcu_witness->component << ", vertex "
                  << report.htcu_witness->v << "\n";
    if (with_certificate && report.alg1) {
        std::cout << "certificate:\n";
        print_certificate(report.certificate);
    }
    return 0;
}

int run_decompose(const std::string& path, bool as_json) {
    MixedGraph g = load_graph_file(path);
    auto components = g.mixed_components();
    if (as_json) {
        json out = json::array();
        for (const MixedComponent& mc : components) {
            json j;
            j["c_set"] = mc.c_set;
            j["vertices"] = mc.original_labels;
            j["directed"] = json::array();
            for (const auto& [v, w] : mc.graph.directed_edges())
                j["directed"].push_back({mc.to_original(v), mc.to_original(w)});
            j["bidirected"] = json::array();
            for (const auto& [v, w] : mc.graph.bidirected_edges())
                j["bidirected"].push_back({mc.to_original(v), mc.to_original(w)});
            out.push_back(std::move(j));
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
        const MixedComponent& mc = components[i];
        std::cout << "component " << i + 1 << "\n";
        std::cout << "  C: " << join_vertices(mc.c_set) << "\n";
        std::cout << "  V: " << join_vertices(mc.original_labels) << "\n";
        for (const auto& [v, w] : mc.graph.directed_edges())
            std::cout << "  d " << mc.to_original(v) << " " << mc.to_original(w) << "\n";
        for (const auto& [v, w] : mc.graph.bidirected_edges())
            std::cout << "  b " << mc.to_original(v) << " " << mc.to_original(w) << "\n";
    }
    return 0;
}

int run_ancestors(const std::string& path, Vertex of, bool as_json) {
    MixedGraph g = load_graph_file(path);
    VertexSet an = g.ancestors({of});
    if (as_json)
        std::cout << json(an).dump() << "\n";
    else
        std::cout << join_vertices(an) << "\n";
    return 0;
}

int run_generate(int n, double p, double q, std::uint64_t seed, int count, bool as_json,
                 const std::string& out_dir) {
    if (count < 1) throw ParseError("--count must be at least 1");
    std::vector<MixedGraph> graphs;
    graphs.reserve(count);
    for (int i = 0; i < count; ++i) {
        GenConfig cfg{n, p, q, mix_seed(seed, static_cast<std::uint64_t>(i))};
        graphs.push_back(random_mixed_graph(cfg));
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        for (int i = 0; i < count; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "graph_%06d.graph", i);
            write_file(fs::path(out_dir) / name, format_graph_text(graphs[i]));
        }
        std::cerr << "wrote " << count << " graph(s) to " << out_dir << "\n";
        return 0;
    }
    if (as_json) {
        if (count == 1) {
            std::cout << graph_to_json(graphs[0]).dump(2) << "\n";
        } else {
            json arr = json::array();
            for (const MixedGraph& g : graphs) arr.push_back(graph_to_json(g));
            std::cout << arr.dump(2) << "\n";
        }
        return 0;
    }
    for (int i = 0; i < count; ++i) {
        if (count > 1) std::cout << "# graph " << i << "\n";
        std::cout << format_graph_text(graphs[i]);
        if (i + 1 < count) std::cout << "\n";
    }
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_dir, int workers_override,
                 const CLI::Option* seed_opt, std::uint64_t seed_value, int target_override,
                 bool save_graphs) {
    SimConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ParseError("cannot open '" + config_path + "'");
        try {
            cfg = sim_config_from_json(json::parse(in));
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid config JSON: ") + e.what());
        }
    }
    if (workers_override > 0) cfg.workers = workers_override;
    cfg.master_seed = resolve_seed(seed_opt, seed_value, cfg.master_seed);
    if (target_override > 0) cfg.target_count = target_override;

    fs::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult result = run_experiment(cfg, [&](const CellResult& cell) {
        const SimRecord& r = cell.record;
        std::cerr << "cell n=" << r.n << " p=" << r.p << " q=" << r.q << ": " << r.inconclusive
                  << " inconclusive of " << r.generated << " generated, a="
                  << (r.inconclusive ? std::to_string(r.a) : "nan")
                  << (r.budget_exhausted ? " [budget exhausted]" : "") << "\n";
        if (save_graphs) {
            char cell_name[64];
            std::snprintf(cell_name, sizeof cell_name, "graphs_n%d_p%g_q%g", r.n, r.p, r.q);
            fs::path dir = fs::path(out_dir) / cell_name;
            fs::create_directories(dir);
            for (std::size_t i = 0; i < cell.graphs.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "graph_%06zu.graph", i);
                write_file(dir / name, format_graph_text(cell.graphs[i]));
            }
        }
    });
    write_file(fs::path(out_dir) / "cells.csv", cells_csv(result.cells));
    write_file(fs::path(out_dir) / "aggregate.csv", aggregate_csv(result.aggregate));
    write_file(fs::path(out_dir) / "b_curves.dat", aggregate_gnuplot(result.aggregate));
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    std::cerr << "experiment finished in " << elapsed.count() / 1000.0 << " s; outputs in "
              << out_dir << "\n";
    return 0;
}

struct CheckLine {
    std::string name;
    std::string result;  // pass | fail | skip
    std::string detail;
};

int run_verify(const std::string& path, std::uint64_t seed, int trials, bool as_json) {
    if (trials < 1) throw ParseError("--trials must be at least 1");
    MixedGraph g = load_graph_file(path);
    IdReport report = classify(g);
    std::vector<CheckLine> checks;
    Parameters last_params{Eigen::MatrixXd(), Eigen::MatrixXd()};
    Covariance last_sigma;

    auto draw = [&](int trial) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
        return sample_parameters(g, rng);
    };

    // Trek rule against the matrix formula.
    if (g.vertex_count() <= 10) {
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            Parameters p = draw(t);
            Covariance sigma = covariance(g, p);
            worst = std::max(worst, (trek_rule_covariance(g, p) - sigma).cwiseAbs().maxCoeff());
            last_params = p;
            last_sigma = sigma;
        }
        checks.push_back({"trek-rule", worst < 1e-9 ? "pass" : "fail",
                          "max |Sigma_trek - Sigma| = " + format_error_value(worst)});
    } else {
        checks.push_back({"trek-rule", "skip", "graph too large for trek enumeration"});
        last_params = draw(0);
        last_sigma = covariance(g, last_params);
    }

    // Analytic Jacobian against central finite differences.
    {
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            Parameters p = draw(t);
            Eigen::MatrixXd analytic = parametrization_jacobian(g, p);
            Eigen::MatrixXd fd = finite_difference_jacobian(g, p);
            for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
                double denom = std::max({analytic.col(c).norm(), fd.col(c).norm(), 1e-12});
                worst = std::max(worst, (analytic.col(c) - fd.col(c)).norm() / denom);
            }
        }
        checks.push_back({"jacobian-fd", worst < 1e-5 ? "pass" : "fail",
                          "max column rel. error = " + format_error_value(worst)});
    }

    // Jacobian rank against the classification.
    {
        JacobianRankReport rank = jacobian_rank(g, draw(0));
        if (report.alg1) {
            bool full = rank.full_column_rank();
            for (int t = 1; t < trials && !full; ++t)
                full = jacobian_rank(g, draw(t)).full_column_rank();
            checks.push_back({"rank-consistency", full ? "pass" : "fail",
                              "identifiable graph, rank " + std::to_string(rank.rank) + "/" +
                                  std::to_string(rank.parameter_count)});
        } else if (report.htcu) {
            bool deficient = true;
            for (int t = 0; t < trials; ++t)
                deficient = deficient && !jacobian_rank(g, draw(t)).full_column_rank();
            checks.push_back({"rank-consistency", deficient ? "pass" : "fail",
                              "unidentifiable graph, rank " + std::to_string(rank.rank) + "/" +
                                  std::to_string(rank.parameter_count)});
        } else {
            checks.push_back({"rank-consistency", "skip",
                              "graph is inconclusive; observed rank " + std::to_string(rank.rank) +
                                  "/" + std::to_string(rank.parameter_count)});
        }
    }

    // Certificate-driven recovery round-trip.
    {
        std::vector<NodeSolution> cert;
        std::string why_not;
        if (SolveResult baseline = htc_identifiable(g); baseline.identified) {
            cert = std::move(baseline.solutions);
        } else if (report.alg1) {
            bool extended = false;
            for (const NodeSolution& ns : report.certificate)
                if (ns.phase == SolutionPhase::extended_ancestral) extended = true;
            if (!extended)
                cert = report.certificate;
            else
                why_not = "certificate routes through Tian components";
        } else {
            why_not = "graph has no identifiability certificate";
        }
        if (cert.empty()) {
            checks.push_back({"recovery", "skip", why_not});
        } else {
            double worst = 0.0;
            std::string failure;
            for (int t = 0; t < trials; ++t) {
                Parameters p = draw(t);
                try {
                    Parameters rec = recover_parameters(g, covariance(g, p), cert);
                    for (int i = 0; i < g.vertex_count(); ++i) {
                        for (int j = 0; j < g.vertex_count(); ++j) {
                            worst = std::max(worst, std::abs(rec.lambda(i, j) - p.lambda(i, j)) /
                                                        std::max(1.0, std::abs(p.lambda(i, j))));
                            worst = std::max(worst, std::abs(rec.omega(i, j) - p.omega(i, j)) /
                                                        std::max(1.0, std::abs(p.omega(i, j))));
                        }
                    }
                    failure.clear();
                } catch (const SingularSystemError& e) {
                    failure = e.what();  // non-generic draw; a later trial can clear it
                }
            }
            if (!failure.empty())
                checks.push_back({"recovery", "fail", failure});
            else
                checks.push_back({"recovery", worst < 1e-6 ? "pass" : "fail",
                                  "max rel. error = " + format_error_value(worst)});
        }
    }

    if (as_json) {
        json j;
        j["graph"] = graph_to_json(g);
        j["report"] = report_to_json(report);
        j["checks"] = json::array();
        for (const CheckLine& c : checks)
            j["checks"].push_back({{"name", c.name}, {"result", c.result}, {"detail", c.detail}});
        j["matrices"] = {{"lambda", matrix_to_json(last_params.lambda)},
                         {"omega", matrix_to_json(last_params.omega)},
                         {"sigma", matrix_to_json(last_sigma)}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "status: " << status_name(report.status) << "\n";
        for (const CheckLine& c : checks) {
            std::string tag = c.result == "pass" ? "PASS" : c.result == "fail" ? "FAIL" : "SKIP";
            std::cout << tag << " " << c.name << ": " << c.detail << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generic identifiability of linear structural equation models on acyclic mixed graphs"};
    app.require_subcommand(1);
    int exit_code = 0;

    std::string cl_path;
    bool cl_json = false, cl_cert = false;
    auto* classify_cmd =
        app.add_subcommand("classify", "classify a graph (HTCI / HTCU / ancestral algorithm)");
    classify_cmd->add_option("file", cl_path, "graph file (text or JSON)")->required();
    classify_cmd->add_flag("--json", cl_json, "emit the full report as JSON");
    classify_cmd->add_flag("--certificate", cl_cert, "print the per-node solve order");
    classify_cmd->callback([&]() { exit_code = run_classify(cl_path, cl_json, cl_cert); });

    std::string de_path;
    bool de_json = false;
    auto* decompose_cmd =
        app.add_subcommand("decompose", "print the mixed components (Tian decomposition)");
    decompose_cmd->add_option("file", de_path, "graph file (text or JSON)")->required();
    decompose_cmd->add_flag("--json", de_json, "emit components as JSON");
    decompose_cmd->callback([&]() { exit_code = run_decompose(de_path, de_json); });

    std::string an_path;
    Vertex an_of = 0;
    bool an_json = false;
    auto* ancestors_cmd = app.add_subcommand("ancestors", "print the ancestor set of a vertex");
    ancestors_cmd->add_option("file", an_path, "graph file (text or JSON)")->required();
    ancestors_cmd->add_option("--of", an_of, "vertex")->required();
    ancestors_cmd->add_flag("--json", an_json, "emit the set as JSON");
    ancestors_cmd->callback([&]() { exit_code = run_ancestors(an_path, an_of, an_json); });

    int ge_n = 0, ge_count = 1;
    double ge_p = 0.0, ge_q = 0.0;
    std::uint64_t ge_seed = 0;
    bool ge_json = false;
    std::string ge_out;
    auto* generate_cmd = app.add_subcommand(
        "generate", "generate random acyclic mixed graphs with connected bidirected part");
    generate_cmd->add_option("--n", ge_n, "vertex count")->required()->check(CLI::PositiveNumber);
    generate_cmd->add_option("--p", ge_p, "bidirected edge probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    generate_cmd->add_option("--q", ge_q, "directed edge probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    auto* ge_seed_opt = generate_cmd->add_option("--seed", ge_seed, "seed (default: TREKID_SEED or 0)");
    generate_cmd->add_option("--count", ge_count, "number of graphs");
    generate_cmd->add_flag("--json", ge_json, "emit JSON");
    generate_cmd->add_option("--out", ge_out, "write one file per graph into this directory");
    generate_cmd->callback([&]() {
        exit_code = run_generate(ge_n, ge_p, ge_q, resolve_seed(ge_seed_opt, ge_seed, 0), ge_count,
                                 ge_json, ge_out);
    });

    std::string si_config, si_out;
    int si_workers = 0, si_target = 0;
    std::uint64_t si_seed = 0;
    bool si_save = false;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "run the inconclusive-graph screening experiment");
    simulate_cmd->add_option("--config", si_config,
                             "JSON config (grids, target_count, master_seed, workers)");
    simulate_cmd
        ->add_option("--out", si_out, "output directory for cells.csv, aggregate.csv, b_curves.dat")
        ->required();
    simulate_cmd->add_option("--workers", si_workers, "override the parallelism degree");
    auto* si_seed_opt = simulate_cmd->add_option("--seed", si_seed, "override the master seed");
    simulate_cmd->add_option("--target", si_target, "override inconclusive graphs per cell");
    simulate_cmd->add_flag("--save-graphs", si_save, "persist retained graphs, one text file each");
    simulate_cmd->callback([&]() {
        exit_code = run_simulate(si_config, si_out, si_workers, si_seed_opt, si_seed, si_target, si_save);
    });

    std::string ve_path;
    std::uint64_t ve_seed = 0;
    int ve_trials = 3;
    bool ve_json = false;
    auto* verify_cmd = app.add_subcommand(
        "verify", "run numeric oracles (trek rule, Jacobian, recovery) on a graph");
    verify_cmd->add_option("file", ve_path, "graph file (text or JSON)")->required();
    auto* ve_seed_opt = verify_cmd->add_option("--seed", ve_seed, "seed (default: TREKID_SEED or 0)");
    verify_cmd->add_option("--trials", ve_trials, "parameter draws per check");
    verify_cmd->add_flag("--json", ve_json, "emit checks and matrices as JSON");
    verify_cmd->callback([&]() {
        exit_code = run_verify(ve_path, resolve_seed(ve_seed_opt, ve_seed, 0), ve_trials, ve_json);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run 'trekid --help' or 'trekid <subcommand> --help' for usage\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const VertexOutOfRangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SelfLoopError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DirectedCycleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
