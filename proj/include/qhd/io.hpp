#pragma once

#include "qhd/blowup.hpp"
#include "qhd/graph.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace qhd {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline mpq_class parse_rational(const std::string& text) {
    mpq_class q;
    if (text.empty() || q.set_str(text, 10) != 0) throw std::invalid_argument("bad rational '" + text + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

inline int parse_int(const std::string& text) {
    std::size_t pos = 0;
    int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("bad integer '" + text + "'");
    return v;
}

/// Reads the line format without checking graph invariants.
inline WeightedGraph parse_graph_unchecked(const std::string& text) {
    WeightedGraph g;
    std::vector<std::pair<int, Edge>> pending;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_c = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        try {
            if (tok[0] == "v") {
                if (tok.size() != 3) throw ParseError(lineno, "expected 'v <id> <weight>'");
                g.add_vertex(parse_int(tok[1]), parse_int(tok[2]));
            } else if (tok[0] == "e") {
                if (tok.size() != 3) throw ParseError(lineno, "expected 'e <id> <id>'");
                pending.push_back({lineno, {parse_int(tok[1]), parse_int(tok[2])}});
            } else if (tok[0] == "c") {
                if (tok.size() != 2) throw ParseError(lineno, "expected 'c <p>/<q>|anharmonic|harmonic'");
                if (have_c) throw ParseError(lineno, "duplicate cross ratio");
                have_c = true;
                if (tok[1] == "anharmonic") g.set_cross_ratio(CrossRatio::anharmonic());
                else if (tok[1] == "harmonic") g.set_cross_ratio(CrossRatio::harmonic());
                else g.set_cross_ratio(CrossRatio::rational(parse_rational(tok[1])));
            } else {
                throw ParseError(lineno, "unknown record '" + tok[0] + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
    }
    for (const auto& [ln, e] : pending) {
        if (!g.has_vertex(e.first) || !g.has_vertex(e.second)) throw ParseError(ln, "dangling edge endpoint");
        try {
            g.add_edge(e.first, e.second);
        } catch (const std::exception& ex) {
            throw ParseError(ln, ex.what());
        }
    }
    if (g.size() == 0) throw ParseError(0, "empty graph");
    return g;
}

inline WeightedGraph parse_graph(const std::string& text) {
    WeightedGraph g = parse_graph_unchecked(text);
    auto r = validate(g);
    if (!r.ok()) throw ParseError(0, "validation failed: " + r.violations.front());
    return g;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string graph_to_text(const WeightedGraph& g) {
    std::string out;
    for (const auto& [v, w] : g.weights()) out += "v " + std::to_string(v) + " " + std::to_string(w) + "\n";
    for (const auto& [a, b] : g.edges()) out += "e " + std::to_string(a) + " " + std::to_string(b) + "\n";
    if (g.cross_ratio()) out += "c " + g.cross_ratio()->str() + "\n";
    return out;
}

inline std::string export_dot(const WeightedGraph& g) {
    std::string out = "graph G {\n";
    for (const auto& [v, w] : g.weights())
        out += "  " + std::to_string(v) + " [label=\"" + std::to_string(v) + ":" + std::to_string(w) + "\"];\n";
    for (const auto& [a, b] : g.edges()) out += "  " + std::to_string(a) + " -- " + std::to_string(b) + ";\n";
    if (g.cross_ratio()) out += "  label=\"c=" + g.cross_ratio()->str() + "\";\n";
    return out + "}\n";
}

/// Parses `seed=A ops=B1,B2@3-4 mod=yes`; `mod` defaults to yes.
inline ConstructionHistory parse_history(const std::string& text) {
    ConstructionHistory h;
    bool have_seed = false;
    std::istringstream in(text);
    for (std::string tok; in >> tok;) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError(0, "expected key=value, got '" + tok + "'");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "seed") {
            if (val.size() != 1) throw ParseError(0, "seed must be A, B or C");
            try {
                h.seed = seed_from_letter(val[0]);
            } catch (const std::exception& e) {
                throw ParseError(0, e.what());
            }
            have_seed = true;
        } else if (key == "ops") {
            std::istringstream os(val);
            for (std::string op; std::getline(os, op, ',');) {
                if (op.empty()) continue;
                if (op == "B1") {
                    h.ops.push_back(BlowUpOp::b1());
                } else if (op.rfind("B2@", 0) == 0) {
                    auto rest = op.substr(3);
                    auto dash = rest.find('-', 1);
                    if (dash == std::string::npos) throw ParseError(0, "bad B2 op '" + op + "'");
                    try {
                        h.ops.push_back(BlowUpOp::b2(parse_int(rest.substr(0, dash)), parse_int(rest.substr(dash + 1))));
                    } catch (const std::exception&) {
                        throw ParseError(0, "bad B2 op '" + op + "'");
                    }
                } else {
                    throw ParseError(0, "unknown op '" + op + "'");
                }
            }
        } else if (key == "mod") {
            if (val == "yes") h.modified = true;
            else if (val == "no") h.modified = false;
            else throw ParseError(0, "mod must be yes or no");
        } else {
            throw ParseError(0, "unknown key '" + key + "'");
        }
    }
    if (!have_seed) throw ParseError(0, "missing seed");
    return h;
}

} // namespace qhd
