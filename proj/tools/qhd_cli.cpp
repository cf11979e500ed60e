// Command-line front end for the qhd library.

#include "qhd/census.hpp"
#include "qhd/cyclic.hpp"
#include "qhd/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qhd;

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitAnomaly = 3;

struct ExitCode {
    int code;
    std::string message;
};

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return read_file(path);
}

WeightedGraph load_tree(const std::string& path) {
    WeightedGraph g;
    try {
        g = parse_graph_unchecked(slurp(path));
    } catch (const std::exception& e) {
        throw ExitCode{kExitParse, e.what()};
    }
    if (!is_tree(g)) throw ExitCode{kExitParse, "graph is not a tree"};
    return g;
}

WeightedGraph load_valid(const std::string& path) {
    try {
        return parse_graph(slurp(path));
    } catch (const std::exception& e) {
        throw ExitCode{kExitParse, e.what()};
    }
}

SeedType seed_opt(const std::string& s) {
    if (s.size() != 1) throw ExitCode{kExitUsage, "type must be A, B or C"};
    try {
        return seed_from_letter(s[0]);
    } catch (const std::exception& e) {
        throw ExitCode{kExitUsage, e.what()};
    }
}

mpq_class rational_opt(const std::string& s) {
    mpq_class q;
    try {
        q = parse_rational(s);
    } catch (const std::exception& e) {
        throw ExitCode{kExitUsage, e.what()};
    }
    if (q == 0 || q == 1) throw ExitCode{kExitUsage, "cross ratio must avoid 0 and 1"};
    return q;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

json matrix_json(const IntersectionMatrix& m) {
    json rows = json::array();
    for (const auto& r : m.entries) {
        json row = json::array();
        for (const auto& x : r) row.push_back(x.get_si());
        rows.push_back(row);
    }
    return {{"order", m.order}, {"entries", rows}};
}

json match_json(const LemmaMatch& m) {
    json j{{"lemma", lemma_name(m.lemma)}, {"bindings", m.bindings}};
    if (m.matched()) {
        j["left_node"] = m.left_node;
        j["right_node"] = m.right_node;
        j["epsilon"] = epsilon_of(m);
    } else {
        j["epsilon"] = nullptr;
    }
    if (!m.note.empty()) j["note"] = m.note;
    return j;
}

json cycle_json(const CycleWeights& s) {
    json j = json::object();
    for (const auto& [v, x] : s) j[std::to_string(v)] = x;
    return j;
}

CycleWeights parse_cycle(const WeightedGraph& g, const std::string& text) {
    CycleWeights s;
    std::stringstream ss(text);
    auto vs = g.vertices();
    std::size_t k = 0;
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (k >= vs.size()) throw ExitCode{kExitUsage, "--cycle has more entries than vertices"};
        try {
            s[vs[k++]] = parse_int(tok);
        } catch (const std::exception&) {
            throw ExitCode{kExitUsage, "bad --cycle entry '" + tok + "'"};
        }
    }
    if (k != vs.size()) throw ExitCode{kExitUsage, "--cycle needs one entry per vertex (ascending id)"};
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resolution-graph calculus, plumbing cohomology and the QHD dimension criterion"};
    app.require_subcommand(1);

    std::string graph_path, history_spec, type = "A", edge, out_path, mode = "both", cycle, dump, scope = "witnesses";
    std::string cross_ratio = "-1";
    std::vector<std::string> types;
    int vertex = 0, max_ops = 6, max_multiplier = 8;
    long p = 0, q = 0;
    std::size_t row_budget = 2000;
    unsigned jobs = 1;
    bool tamper = false, raw = false;

    auto* validate_cmd = app.add_subcommand("validate", "Check graph invariants");
    validate_cmd->add_option("graph", graph_path, "Graph file ('-' for stdin)")->required();

    auto* matrix_cmd = app.add_subcommand("matrix", "Print the intersection matrix");
    matrix_cmd->add_option("graph", graph_path)->required();

    auto* negdef_cmd = app.add_subcommand("negdef", "Determinant, leading minors and negative definiteness");
    negdef_cmd->add_option("graph", graph_path)->required();

    auto* blowup_cmd = app.add_subcommand("blowup", "Blow up the (-1)-vertex (B-1) or an edge at it (B-2)");
    blowup_cmd->add_option("graph", graph_path)->required();
    blowup_cmd->add_option("--edge", edge, "Edge a-b for (B-2)");

    auto* blowdown_cmd = app.add_subcommand("blowdown", "Contract a (-1)-vertex of valency <= 2");
    blowdown_cmd->add_option("graph", graph_path)->required();
    blowdown_cmd->add_option("vertex", vertex)->required();

    auto* augment_cmd = app.add_subcommand("augment", "Build the augmented graph");
    augment_cmd->add_option("graph", graph_path)->required();
    augment_cmd->add_option("--type", type)->required();

    auto* minimalize_cmd = app.add_subcommand("minimalize", "Strip the appended chain of an augmented graph");
    minimalize_cmd->add_option("graph", graph_path)->required();
    minimalize_cmd->add_option("--type", type)->required();

    auto* enumerate_cmd = app.add_subcommand("enumerate", "Enumerate minimal graphs of one type (JSON lines)");
    enumerate_cmd->add_option("--type", type)->required();
    enumerate_cmd->add_option("--max-ops", max_ops)->check(CLI::NonNegativeNumber);
    enumerate_cmd->add_option("--cross-ratio", cross_ratio);
    enumerate_cmd->add_flag("--raw", raw, "Emit every history instead of isomorphism classes");

    auto* classify_cmd = app.add_subcommand("classify", "Shape class and two-node pattern");
    classify_cmd->add_option("graph", graph_path)->required();

    auto* cyclic_cmd = app.add_subcommand("cyclic", "Cyclic-quotient chains");
    cyclic_cmd->require_subcommand(1);
    auto* recognize_cmd = cyclic_cmd->add_subcommand("recognize", "Recognize 1/p^2(1,pq-1) chains");
    recognize_cmd->add_option("graph", graph_path)->required();
    auto* chain_cmd = cyclic_cmd->add_subcommand("chain", "Emit the chain of 1/p^2(1,pq-1)");
    chain_cmd->add_option("p", p)->required();
    chain_cmd->add_option("q", q)->required();

    auto* h1_cmd = app.add_subcommand("h1", "Plumbing cohomology h^1");
    h1_cmd->add_option("graph", graph_path)->required();
    h1_cmd->add_option("--cycle", cycle, "Comma-separated s_i by ascending vertex id");
    h1_cmd->add_option("--max-multiplier", max_multiplier)->check(CLI::Range(3, 64));
    h1_cmd->add_option("--dump-matrix", dump, "Write the sparse matrix as 'row col num/den' triplets");

    auto* qhd_cmd = app.add_subcommand("qhd", "Dimension bound for a construction history");
    qhd_cmd->add_option("history", history_spec, "e.g. 'seed=A ops=B2@0-1,B1 mod=yes'")->required();
    qhd_cmd->add_option("--mode", mode)->check(CLI::IsMember({"bookkeeping", "cohomology", "both"}));
    qhd_cmd->add_option("--cross-ratio", cross_ratio);
    qhd_cmd->add_option("--max-multiplier", max_multiplier)->check(CLI::Range(3, 64));

    auto* census_cmd = app.add_subcommand("census", "Enumerate, classify and evaluate (JSON lines)");
    census_cmd->add_option("--type", types, "A, B or C (repeatable; default all)");
    census_cmd->add_option("--max-ops", max_ops)->check(CLI::NonNegativeNumber);
    census_cmd->add_option("--max-multiplier", max_multiplier)->check(CLI::Range(3, 64));
    census_cmd->add_option("--cross-ratio", cross_ratio);
    census_cmd->add_option("--cohomology", scope)->check(CLI::IsMember({"none", "witnesses", "all"}));
    census_cmd->add_option("--row-budget", row_budget);
    census_cmd->add_option("--jobs", jobs);
    census_cmd->add_option("-o,--output", out_path);
    census_cmd->add_flag("--tamper-ledger", tamper, "Negative control: corrupt one weight before each ledger check");

    auto* replay_cmd = app.add_subcommand("replay", "Graph produced by a construction history (valency-4 graphs get the cross ratio)");
    replay_cmd->add_option("history", history_spec)->required();
    replay_cmd->add_option("--cross-ratio", cross_ratio);

    auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz export");
    dot_cmd->add_option("graph", graph_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (validate_cmd->parsed()) {
            WeightedGraph g;
            try {
                g = parse_graph_unchecked(slurp(graph_path));
            } catch (const std::exception& e) {
                throw ExitCode{kExitParse, e.what()};
            }
            auto r = validate(g);
            print({{"valid", r.ok()}, {"violations", r.violations}});
            return r.ok() ? 0 : kExitParse;
        }
        if (matrix_cmd->parsed()) {
            print(matrix_json(intersection_matrix(load_tree(graph_path))));
            return 0;
        }
        if (negdef_cmd->parsed()) {
            auto m = intersection_matrix(load_tree(graph_path));
            json minors = json::array();
            for (const auto& x : leading_minors(m.entries)) minors.push_back(x.get_str());
            print({{"det", determinant(m).get_str()}, {"leading_minors", minors},
                   {"negative_definite", is_negative_definite(m)}});
            return 0;
        }
        if (blowup_cmd->parsed()) {
            auto g = load_tree(graph_path);
            if (edge.empty()) {
                std::cout << graph_to_text(apply_b1(g));
            } else {
                auto dash = edge.find('-', 1);
                if (dash == std::string::npos) throw ExitCode{kExitUsage, "--edge expects a-b"};
                std::cout << graph_to_text(apply_b2(g, parse_int(edge.substr(0, dash)), parse_int(edge.substr(dash + 1))));
            }
            return 0;
        }
        if (blowdown_cmd->parsed()) {
            std::cout << graph_to_text(blow_down(load_tree(graph_path), vertex));
            return 0;
        }
        if (augment_cmd->parsed()) {
            std::cout << graph_to_text(augment(load_tree(graph_path), seed_opt(type)));
            return 0;
        }
        if (minimalize_cmd->parsed()) {
            std::cout << graph_to_text(minimalize(load_tree(graph_path), seed_opt(type)));
            return 0;
        }
        if (enumerate_cmd->parsed()) {
            SeedType t = seed_opt(type);
            mpq_class c = rational_opt(cross_ratio);
            if (raw) {
                for (const auto& e : enumerate_histories(t, max_ops, c))
                    std::cout << json{{"history", e.history.str()}, {"canonical", canonical_form(e.minimal)}}.dump() << "\n";
                return 0;
            }
            for (const auto& cls : enumerate(t, max_ops, c)) {
                auto m = intersection_matrix(cls.minimal);
                json rec{{"canonical", cls.canonical},
                         {"graph", graph_json(cls.minimal)},
                         {"nodes", nodes(cls.minimal).size()},
                         {"det", determinant(m).get_str()},
                         {"negdef", is_negative_definite(m)},
                         {"witness", cls.witness.str()},
                         {"histories", cls.histories.size()}};
                std::cout << rec.dump() << "\n";
            }
            return 0;
        }
        if (classify_cmd->parsed()) {
            auto g = load_tree(graph_path);
            json j{{"shape", classify_shape(g).str()}};
            if (minus_one_vertices(g).size() == 1 && nodes(g).size() == 2) {
                auto m = match_lemma(g);
                j.update(match_json(m));
            } else {
                j["lemma"] = nullptr;
                j["bindings"] = json::object();
                j["epsilon"] = nullptr;
                j["note"] = "lemma patterns apply to non-minimal graphs with a unique (-1)-vertex and two nodes";
            }
            print(j);
            return 0;
        }
        if (recognize_cmd->parsed()) {
            auto g = load_tree(graph_path);
            auto r = recognize_qhd_linear_both(g);
            json j{{"qhd_linear", r.witness.has_value()}};
            if (r.witness) j["witness"] = {{"p", r.witness->p.get_str()}, {"q", r.witness->q.get_str()}};
            if (r.mirror) j["mirror"] = {{"p", r.mirror->p.get_str()}, {"q", r.mirror->q.get_str()}};
            print(j);
            return 0;
        }
        if (chain_cmd->parsed()) {
            mpz_class P(p), Q(q);
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), P.get_mpz_t(), Q.get_mpz_t());
            if (!(P > Q && Q > 0) || g != 1) throw ExitCode{kExitUsage, "need coprime p > q > 0"};
            std::cout << graph_to_text(chain_graph(hj_expand(P * P, P * Q - 1)));
            return 0;
        }
        if (h1_cmd->parsed()) {
            auto g = load_valid(graph_path);
            if (!cycle.empty()) {
                auto s = parse_cycle(g, cycle);
                auto rep = h1_report(g, s);
                if (!dump.empty()) {
                    std::ofstream f(dump);
                    dump_matrix(f, cech_matrix(g, s));
                }
                print({{"cycle", cycle_json(s)}, {"rows", rep.rows}, {"cols", rep.cols}, {"rank", rep.rank},
                       {"vertex_term", rep.vertex_term}, {"h1", rep.h1}});
                return 0;
            }
            try {
                auto r = h1_log(g, max_multiplier);
                json samples = json::array();
                for (const auto& [m, rep] : r.samples)
                    samples.push_back({{"multiplier", m}, {"rows", rep.rows}, {"cols", rep.cols}, {"rank", rep.rank},
                                       {"vertex_term", rep.vertex_term}, {"h1", rep.h1}});
                if (!dump.empty()) {
                    std::ofstream f(dump);
                    dump_matrix(f, cech_matrix(g, scale(r.s0, r.samples.back().first)));
                }
                print({{"h1_log", r.value}, {"s0", cycle_json(r.s0)}, {"samples", samples}});
            } catch (const NonConvergenceError& e) {
                throw ExitCode{kExitAnomaly, e.what()};
            }
            return 0;
        }
        if (qhd_cmd->parsed()) {
            ConstructionHistory h;
            try {
                h = parse_history(history_spec);
            } catch (const std::exception& e) {
                throw ExitCode{kExitParse, e.what()};
            }
            CriterionOptions opt{max_multiplier, rational_opt(cross_ratio)};
            WeightedGraph g = minimal_graph(h, opt.cross_ratio);
            json out{{"history", h.str()}, {"minimal", graph_json(g)}, {"shape", classify_shape(g).str()}};
            if (nodes(g).size() < 2) {
                out["note"] = "fewer than two nodes: outside the two-node criterion";
                print(out);
                return 0;
            }
            int rc = 0;
            if (mode != "cohomology") {
                try {
                    out["bookkeeping"] = verdict_json(dimension_bound(h, Mode::Bookkeeping, opt));
                } catch (const UnmatchedGamma1& e) {
                    out["bookkeeping"] = {{"error", e.what()}, {"verdict", "Inconclusive"}};
                    rc = kExitAnomaly;
                }
            }
            if (mode != "bookkeeping") {
                try {
                    out["cohomology"] = verdict_json(dimension_bound(h, Mode::Cohomology, opt));
                } catch (const NonConvergenceError& e) {
                    out["cohomology"] = {{"error", e.what()}, {"verdict", "Inconclusive"}};
                    rc = kExitAnomaly;
                }
            }
            print(out);
            return rc;
        }
        if (census_cmd->parsed()) {
            CensusConfig cfg;
            if (!types.empty()) {
                cfg.types.clear();
                for (const auto& t : types) cfg.types.push_back(seed_opt(t));
            }
            cfg.max_ops = max_ops;
            cfg.max_multiplier = max_multiplier;
            cfg.cross_ratio = rational_opt(cross_ratio);
            cfg.scope = scope == "none" ? CohomologyScope::None : scope == "all" ? CohomologyScope::All : CohomologyScope::Witnesses;
            cfg.row_budget = row_budget;
            cfg.jobs = jobs;
            cfg.tamper_ledger = tamper;
            auto rep = run_census(cfg);
            if (out_path.empty()) {
                std::cout << rep.jsonl();
            } else {
                std::ofstream f(out_path);
                f << rep.jsonl();
            }
            if (!rep.anomalies_empty()) {
                std::cerr << "census: " << rep.summary["anomalies"].size() << " anomalies\n";
                return kExitAnomaly;
            }
            return 0;
        }
        if (replay_cmd->parsed()) {
            ConstructionHistory h;
            try {
                h = parse_history(history_spec);
            } catch (const std::exception& e) {
                throw ExitCode{kExitParse, e.what()};
            }
            std::cout << graph_to_text(with_default_cross_ratio(replay(h), rational_opt(cross_ratio)));
            return 0;
        }
        if (dot_cmd->parsed()) {
            std::cout << export_dot(load_tree(graph_path));
            return 0;
        }
    } catch (const ExitCode& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const UnmatchedGamma1& e) {
        std::cerr << "anomaly: " << e.what() << "\n";
        return kExitAnomaly;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitUsage;
}
