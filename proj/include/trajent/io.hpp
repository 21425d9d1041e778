#pragma once

#include <json.hpp>

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "trajent/chain.hpp"

namespace trajent {

/// Chain from `{"states": [...], "matrix": [[...], ...]}`.
inline MarkovChain load_chain_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("states") || !j.contains("matrix"))
        throw Error(ErrorCode::ParseError, "chain JSON needs \"states\" and \"matrix\" fields");
    const auto& jstates = j["states"];
    const auto& jmatrix = j["matrix"];
    if (!jstates.is_array() || jstates.empty())
        throw Error(ErrorCode::ParseError, "\"states\" must be a non-empty array of labels");
    if (!jmatrix.is_array() || jmatrix.size() != jstates.size())
        throw Error(ErrorCode::ParseError, "\"matrix\" must have one row per state");

    std::vector<std::string> labels;
    labels.reserve(jstates.size());
    for (const auto& s : jstates) {
        if (!s.is_string())
            throw Error(ErrorCode::ParseError, "state labels must be strings");
        labels.push_back(s.get<std::string>());
    }
    const auto n = static_cast<StateIndex>(labels.size());
    Matrix m(n, n);
    for (StateIndex r = 0; r < n; ++r) {
        const auto& row = jmatrix[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<StateIndex>(row.size()) != n)
            throw Error(ErrorCode::ParseError,
                        "matrix row " + std::to_string(r) + " must hold " + std::to_string(n) +
                            " numbers");
        for (StateIndex c = 0; c < n; ++c) {
            const auto& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number())
                throw Error(ErrorCode::ParseError,
                            "matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                                ") is not a number");
            m(r, c) = v.get<double>();
        }
    }
    return MarkovChain::build(std::move(labels), std::move(m));
}

/// Chain from a tab-separated edge list: `src<TAB>dst<TAB>probability` per
/// line. Blank lines and lines starting with '#' are skipped; absent edges
/// are 0; states appear in first-appearance order.
inline MarkovChain load_chain_tsv(std::istream& in) {
    std::vector<std::string> labels;
    std::map<std::string, StateIndex> seen;
    auto intern = [&](const std::string& label) {
        auto [it, fresh] = seen.emplace(label, static_cast<StateIndex>(labels.size()));
        if (fresh) labels.push_back(label);
        return it->second;
    };

    struct Edge {
        StateIndex src, dst;
        double p;
    };
    std::vector<Edge> edges;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": expected src<TAB>dst<TAB>probability",
                        line_no);
        const std::string src = line.substr(0, t1);
        const std::string dst = line.substr(t1 + 1, t2 - t1 - 1);
        const std::string num = line.substr(t2 + 1);
        if (src.empty() || dst.empty())
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty label",
                        line_no);
        double p = 0.0;
        try {
            std::size_t used = 0;
            p = std::stod(num, &used);
            while (used < num.size() && (num[used] == ' ' || num[used] == '\t')) ++used;
            if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": bad probability \"" + num + "\"",
                        line_no);
        }
        edges.push_back({intern(src), intern(dst), p});
    }
    if (labels.empty())
        throw Error(ErrorCode::ParseError, "edge list holds no edges");

    const auto n = static_cast<StateIndex>(labels.size());
    Matrix m = Matrix::Zero(n, n);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> set =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    for (const Edge& e : edges) {
        if (set(e.src, e.dst))
            throw Error(ErrorCode::DuplicateEdge,
                        "edge " + labels[static_cast<std::size_t>(e.src)] + " -> " +
                            labels[static_cast<std::size_t>(e.dst)] + " listed twice");
        set(e.src, e.dst) = true;
        m(e.src, e.dst) = e.p;
    }
    return MarkovChain::build(std::move(labels), std::move(m));
}

/// Loads a chain file, deciding the format by content: files whose first
/// non-whitespace character is '{' parse as JSON, anything else as a TSV
/// edge list.
inline MarkovChain load_chain_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::stringstream buffer;
    buffer << f.rdbuf();
    const std::string text = buffer.str();
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size())
        throw Error(ErrorCode::ParseError, path + " is empty");
    std::istringstream in(text);
    try {
        return text[i] == '{' ? load_chain_json(in) : load_chain_tsv(in);
    } catch (Error& e) {
        throw Error(e.code(), path + ": " + e.message(), e.index());
    }
}

inline nlohmann::json chain_to_json(const MarkovChain& chain) {
    nlohmann::json rows = nlohmann::json::array();
    for (StateIndex r = 0; r < chain.size(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (StateIndex c = 0; c < chain.size(); ++c) row.push_back(chain.prob(r, c));
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"states", chain.labels()}, {"matrix", std::move(rows)}};
}

}  // namespace trajent
