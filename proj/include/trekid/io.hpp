#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trekid/identify.hpp"
#include "trekid/mixed_graph.hpp"
#include "trekid/sim.hpp"

#include <Eigen/Dense>

namespace trekid {

using json = nlohmann::json;

namespace detail {

inline int parse_int_token(const std::string& token, int line_no) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(token, &used);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + token +
                         "'");
    }
    if (used != token.size())
        throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + token +
                         "'");
    return value;
}

}  // namespace detail

// Line-based graph text format:
//   graph <n>
//   d <i> <j>      directed edge i -> j
//   b <i> <j>      bidirected edge i <-> j
// '#' starts a comment; blank lines are skipped. Malformed lines are rejected
// with their line number.
inline MixedGraph parse_graph_text(std::istream& in) {
    int n = -1;
    EdgeList directed, bidirected;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string kind;
        if (!(tokens >> kind)) continue;
        if (kind == "graph") {
            if (n >= 0) throw ParseError("line " + std::to_string(line_no) + ": duplicate graph header");
            std::string count;
            if (!(tokens >> count))
                throw ParseError("line " + std::to_string(line_no) + ": graph header needs a vertex count");
            n = detail::parse_int_token(count, line_no);
        } else if (kind == "d" || kind == "b") {
            if (n < 0)
                throw ParseError("line " + std::to_string(line_no) + ": edge before graph header");
            std::string a, b;
            if (!(tokens >> a >> b))
                throw ParseError("line " + std::to_string(line_no) + ": edge line needs two vertices");
            Edge e{detail::parse_int_token(a, line_no), detail::parse_int_token(b, line_no)};
            (kind == "d" ? directed : bidirected).push_back(e);
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown directive '" + kind + "'");
        }
        std::string extra;
        if (tokens >> extra)
            throw ParseError("line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
    }
    if (n < 0) throw ParseError("missing graph header");
    try {
        return MixedGraph(n, std::move(directed), std::move(bidirected));
    } catch (const Error& e) {
        throw ParseError(std::string("invalid graph: ") + e.what());
    }
}

inline MixedGraph parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    return parse_graph_text(in);
}

inline std::string format_graph_text(const MixedGraph& g) {
    std::string out = "graph " + std::to_string(g.vertex_count()) + "\n";
    for (const auto& [v, w] : g.directed_edges())
        out += "d " + std::to_string(v) + " " + std::to_string(w) + "\n";
    for (const auto& [v, w] : g.bidirected_edges())
        out += "b " + std::to_string(v) + " " + std::to_string(w) + "\n";
    return out;
}

inline json graph_to_json(const MixedGraph& g) {
    json j;
    j["n"] = g.vertex_count();
    j["directed"] = json::array();
    for (const auto& [v, w] : g.directed_edges()) j["directed"].push_back({v, w});
    j["bidirected"] = json::array();
    for (const auto& [v, w] : g.bidirected_edges()) j["bidirected"].push_back({v, w});
    return j;
}

inline MixedGraph graph_from_json(const json& j) {
    try {
        int n = j.at("n").get<int>();
        EdgeList directed, bidirected;
        for (const auto& e : j.value("directed", json::array()))
            directed.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        for (const auto& e : j.value("bidirected", json::array()))
            bidirected.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        return MixedGraph(n, std::move(directed), std::move(bidirected));
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid graph JSON: ") + e.what());
    } catch (const Error& e) {
        throw ParseError(std::string("invalid graph: ") + e.what());
    }
}

// Accepts either format; JSON when the first non-space character is '{'.
inline MixedGraph parse_graph_auto(const std::string& content) {
    for (char c : content) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') {
            try {
                return graph_from_json(json::parse(content));
            } catch (const json::exception& e) {
                throw ParseError(std::string("invalid JSON: ") + e.what());
            }
        }
        break;
    }
    return parse_graph_text(content);
}

inline MixedGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_graph_auto(content);
}

inline std::string status_name(GraphStatus s) {
    switch (s) {
        case GraphStatus::generically_identifiable: return "generically_identifiable";
        case GraphStatus::generically_unidentifiable: return "generically_unidentifiable";
        case GraphStatus::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

inline GraphStatus status_from_name(const std::string& s) {
    if (s == "generically_identifiable") return GraphStatus::generically_identifiable;
    if (s == "generically_unidentifiable") return GraphStatus::generically_unidentifiable;
    if (s == "inconclusive") return GraphStatus::inconclusive;
    throw ParseError("unknown status '" + s + "'");
}

inline std::string phase_name(SolutionPhase p) {
    switch (p) {
        case SolutionPhase::baseline: return "baseline";
        case SolutionPhase::extended_ancestral: return "extended_ancestral";
        case SolutionPhase::plain_ancestral: return "plain_ancestral";
    }
    return "baseline";
}

inline SolutionPhase phase_from_name(const std::string& s) {
    if (s == "baseline") return SolutionPhase::baseline;
    if (s == "extended_ancestral") return SolutionPhase::extended_ancestral;
    if (s == "plain_ancestral") return SolutionPhase::plain_ancestral;
    throw ParseError("unknown phase '" + s + "'");
}

inline json node_solution_to_json(const NodeSolution& ns) {
    json j;
    j["v"] = ns.v;
    j["phase"] = phase_name(ns.phase);
    j["context"] = {{"ancestral_set", ns.context.ancestral_set},
                    {"c_set", ns.context.c_set},
                    {"vertices", ns.context.vertices}};
    j["allowed"] = ns.allowed;
    j["system"] = json::array();
    for (const HalfTrek& ht : ns.system.half_treks)
        j["system"].push_back({{"source", ht.source},
                               {"starts_bidirected", ht.starts_bidirected},
                               {"right", ht.right}});
    return j;
}

inline NodeSolution node_solution_from_json(const json& j) {
    NodeSolution ns;
    ns.v = j.at("v").get<Vertex>();
    ns.phase = phase_from_name(j.at("phase").get<std::string>());
    const json& ctx = j.at("context");
    ns.context.ancestral_set = ctx.at("ancestral_set").get<VertexSet>();
    ns.context.c_set = ctx.at("c_set").get<VertexSet>();
    ns.context.vertices = ctx.at("vertices").get<VertexSet>();
    ns.allowed = j.at("allowed").get<VertexSet>();
    for (const auto& h : j.at("system")) {
        HalfTrek ht;
        ht.source = h.at("source").get<Vertex>();
        ht.starts_bidirected = h.at("starts_bidirected").get<bool>();
        ht.right = h.at("right").get<std::vector<Vertex>>();
        ns.system.half_treks.push_back(std::move(ht));
    }
    return ns;
}

inline json report_to_json(const IdReport& report) {
    json j;
    j["status"] = status_name(report.status);
    j["htci_plain"] = report.htci_plain;
    j["htcu"] = report.htcu;
    j["alg1"] = report.alg1;
    if (report.htcu_witness)
        j["htcu_witness"] = {{"component", report.htcu_witness->component},
                             {"vertex", report.htcu_witness->v}};
    else
        j["htcu_witness"] = nullptr;
    j["certificate"] = json::array();
    for (const NodeSolution& ns : report.certificate) j["certificate"].push_back(node_solution_to_json(ns));
    return j;
}

inline IdReport report_from_json(const json& j) {
    try {
        IdReport report;
        report.status = status_from_name(j.at("status").get<std::string>());
        report.htci_plain = j.at("htci_plain").get<bool>();
        report.htcu = j.at("htcu").get<bool>();
        report.alg1 = j.at("alg1").get<bool>();
        if (!j.at("htcu_witness").is_null()) {
            HtcuWitness w;
            w.component = j["htcu_witness"].at("component").get<int>();
            w.v = j["htcu_witness"].at("vertex").get<Vertex>();
            report.htcu_witness = w;
        }
        for (const auto& ns : j.at("certificate"))
            report.certificate.push_back(node_solution_from_json(ns));
        return report;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid report JSON: ") + e.what());
    }
}

// Matrices as nested row-major arrays.
inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    try {
        const auto rows = j.size();
        const auto cols = rows ? j.at(0).size() : 0;
        Eigen::MatrixXd m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid matrix JSON: ") + e.what());
    }
}

inline SimConfig sim_config_from_json(const json& j) {
    try {
        SimConfig cfg;
        if (j.contains("n_values")) cfg.n_values = j["n_values"].get<std::vector<int>>();
        if (j.contains("p_values")) cfg.p_values = j["p_values"].get<std::vector<double>>();
        if (j.contains("q_values")) cfg.q_values = j["q_values"].get<std::vector<double>>();
        if (j.contains("target_count")) cfg.target_count = j["target_count"].get<int>();
        if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("max_attempts")) cfg.max_attempts = j["max_attempts"].get<long long>();
        if (cfg.target_count < 1) throw ParseError("target_count must be at least 1");
        if (cfg.n_values.empty() || cfg.p_values.empty() || cfg.q_values.empty())
            throw ParseError("parameter grids must be non-empty");
        return cfg;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid simulation config: ") + e.what());
    }
}

inline json sim_config_to_json(const SimConfig& cfg) {
    return json{{"n_values", cfg.n_values},       {"p_values", cfg.p_values},
                {"q_values", cfg.q_values},       {"target_count", cfg.target_count},
                {"master_seed", cfg.master_seed}, {"workers", cfg.workers},
                {"max_attempts", cfg.max_attempts}};
}

}  // namespace trekid
