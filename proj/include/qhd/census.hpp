#pragma once

#include "qhd/criterion.hpp"
#include "qhd/io.hpp"

#include <json.hpp>

#include <atomic>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

namespace qhd {

using json = nlohmann::json;

enum class CohomologyScope { None, Witnesses, All };

struct CensusConfig {
    std::vector<SeedType> types = all_seed_types();
    int max_ops = 6;
    int max_multiplier = 8;
    mpq_class cross_ratio = -1;
    CohomologyScope scope = CohomologyScope::Witnesses;
    std::size_t row_budget = 2000;  // cohomology runs only if the matrix at 3*s0 has at most this many rows
    unsigned jobs = 1;
    bool tamper_ledger = false;  // negative-control hook: shifts one weight before the ledger check
};

struct CensusReport {
    std::vector<json> records;
    json summary;

    bool anomalies_empty() const { return summary.at("anomalies").empty(); }

    std::string jsonl() const {
        std::string out;
        for (const auto& r : records) out += r.dump() + "\n";
        out += json{{"summary", summary}}.dump() + "\n";
        return out;
    }
};

inline json graph_json(const WeightedGraph& g) {
    json vs = json::array(), es = json::array();
    for (const auto& [v, w] : g.weights()) vs.push_back({v, w});
    for (const auto& [a, b] : g.edges()) es.push_back({a, b});
    json j{{"vertices", vs}, {"edges", es}};
    j["cross_ratio"] = g.cross_ratio() ? json(g.cross_ratio()->str()) : json(nullptr);
    return j;
}

inline json verdict_json(const QhdVerdict& v) {
    json j{{"mode", mode_name(v.mode)},
           {"sum_d3", v.sum_d3},
           {"h1_bound", v.h1_bound},
           {"dim_bound", v.dim_bound},
           {"verdict", verdict_name(v.verdict)}};
    if (v.annotation) {
        j["stage"] = stage_name(v.annotation->stage);
        j["epsilon"] = v.annotation->epsilon;
        j["m"] = v.annotation->m;
        j["lemma"] = lemma_name(v.annotation->gamma1_match.lemma);
        j["bindings"] = v.annotation->gamma1_match.bindings;
    }
    if (v.h1) {
        json s = json::array();
        for (const auto& [m, rep] : v.h1->samples)
            s.push_back({{"multiplier", m}, {"rows", rep.rows}, {"cols", rep.cols}, {"rank", rep.rank},
                         {"vertex_term", rep.vertex_term}, {"h1", rep.h1}});
        j["h1_samples"] = s;
        j["s0"] = v.h1->s0;
    }
    return j;
}

/// Runs f(i) for i in [0, n) on `jobs` threads; callers write results by index.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& f) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& th : pool) th.join();
}

namespace detail {

struct ClassTask {
    SeedType type;
    EnumeratedClass cls;
    json record;
    std::vector<json> anomalies;
    std::vector<json> excluded;
    std::vector<json> disagreements;
    bool run_cohomology = false;
    bool gamma1_stage = false;
    int bookkeeping_dim = 0;
};

inline json issue(const ClassTask& t, const ConstructionHistory& h, const std::string& reason) {
    return {{"type", std::string(1, seed_letter(t.type))},
            {"canonical", t.cls.canonical},
            {"history", h.str()},
            {"reason", reason}};
}

inline void evaluate_bookkeeping(ClassTask& t, const CensusConfig& cfg) {
    json& rec = t.record;
    const auto& w = t.cls.witness;
    int min_dim = std::numeric_limits<int>::max(), max_dim = std::numeric_limits<int>::min();
    int ledger_checked = 0, ledger_failed = 0, evaluated = 0;
    bool excluded = false;
    for (const auto& h : t.cls.histories) {
        try {
            WeightedGraph g = minimal_graph(h, cfg.cross_ratio);
            QhdVerdict v = bookkeeping_bound(h, g);
            ++evaluated;
            min_dim = std::min(min_dim, v.dim_bound);
            max_dim = std::max(max_dim, v.dim_bound);
            if (v.dim_bound != 0) t.anomalies.push_back(issue(t, h, "bookkeeping dim_bound " + std::to_string(v.dim_bound)));
            if (v.annotation->stage == Stage::BeyondGamma2) {
                if (cfg.tamper_ledger) {
                    auto wv = g.weights().begin();
                    g.set_weight(wv->first, wv->second - 1);
                }
                ++ledger_checked;
                if (!ledger_check(*v.annotation, g)) {
                    ++ledger_failed;
                    t.anomalies.push_back(issue(t, h, "ledger identity failed"));
                }
            }
            if (h.str() == w.str()) {
                rec["bookkeeping"] = verdict_json(v);
                t.bookkeeping_dim = v.dim_bound;
                t.gamma1_stage = v.annotation->stage == Stage::IsGamma1Bar;
            }
        } catch (const UnmatchedGamma1& e) {
            if (e.non_rational()) {
                excluded = true;
                if (h.str() == w.str()) t.excluded.push_back(issue(t, h, e.match.note));
            } else {
                t.anomalies.push_back(issue(t, h, e.what()));
            }
        } catch (const std::exception& e) {
            t.anomalies.push_back(issue(t, h, e.what()));
        }
    }
    if (excluded) rec["excluded"] = "non-rational: valency-4 node with self-intersection > -3";
    if (evaluated) {
        rec["bookkeeping_min_dim"] = min_dim;
        rec["bookkeeping_max_dim"] = max_dim;
    }
    rec["ledger"] = {{"checked", ledger_checked}, {"failed", ledger_failed}};
}

inline void plan_cohomology(ClassTask& t, const CensusConfig& cfg) {
    if (cfg.scope == CohomologyScope::None || !t.record.contains("bookkeeping")) return;
    if (cfg.scope == CohomologyScope::Witnesses && !t.gamma1_stage) return;
    const auto& g = t.cls.minimal;
    std::size_t rows = row_count(g, scale(ample_cycle(g), 3));
    if (rows > cfg.row_budget) {
        t.record["cohomology_skipped"] = "row budget: " + std::to_string(rows) + " rows at 3*s0";
        return;
    }
    t.run_cohomology = true;
}

inline void evaluate_cohomology(ClassTask& t, const CensusConfig& cfg) {
    const auto& h = t.cls.witness;
    try {
        QhdVerdict v = cohomology_bound(t.cls.minimal, cfg.max_multiplier);
        json j = verdict_json(v);
        bool agree = v.dim_bound == t.bookkeeping_dim;
        j["agrees_with_bookkeeping"] = agree;
        t.record["cohomology"] = j;
        if (t.gamma1_stage) {
            int expected = t.record["bookkeeping"]["epsilon"].get<int>();
            if (v.h1_bound != expected)
                t.anomalies.push_back(issue(t, h, "h1_log " + std::to_string(v.h1_bound) + " differs from epsilon " +
                                                      std::to_string(expected)));
            if (!agree) t.anomalies.push_back(issue(t, h, "cohomology and bookkeeping dim_bound differ"));
        } else if (!agree) {
            json d = issue(t, h, "h1_log exceeds the bookkeeping bound");
            d["h1_log"] = v.h1_bound;
            d["bookkeeping_h1_bound"] = t.record["bookkeeping"]["h1_bound"];
            d["cohomology_dim_bound"] = v.dim_bound;
            t.disagreements.push_back(d);
        }
    } catch (const NonConvergenceError& e) {
        t.anomalies.push_back(issue(t, h, e.what()));
    } catch (const std::exception& e) {
        t.anomalies.push_back(issue(t, h, std::string("cohomology: ") + e.what()));
    }
}

} // namespace detail

inline CensusReport run_census(const CensusConfig& cfg) {
    std::vector<detail::ClassTask> tasks;
    for (SeedType t : cfg.types)
        for (auto& c : enumerate(t, cfg.max_ops, cfg.cross_ratio)) tasks.push_back({t, std::move(c), {}, {}, {}, {}});

    for (auto& t : tasks) {
        const auto& g = t.cls.minimal;
        auto im = intersection_matrix(g);
        auto shape = classify_shape(g);
        json& rec = t.record;
        rec["type"] = std::string(1, seed_letter(t.type));
        rec["canonical"] = t.cls.canonical;
        rec["graph"] = graph_json(g);
        rec["nodes"] = nodes(g).size();
        rec["det"] = determinant(im).get_str();
        rec["negdef"] = is_negative_definite(im);
        rec["shape"] = shape.str();
        rec["sum_d3"] = sum_d_minus_3(g);
        rec["witness"] = t.cls.witness.str();
        rec["histories"] = t.cls.histories.size();
        if (nodes(g).size() < 2) {
            rec["note"] = "fewer than two nodes: outside the two-node criterion";
            continue;
        }
        detail::evaluate_bookkeeping(t, cfg);
        detail::plan_cohomology(t, cfg);
    }

    std::vector<std::size_t> coh;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (tasks[i].run_cohomology) coh.push_back(i);
    parallel_for(coh.size(), cfg.jobs, [&](std::size_t k) { detail::evaluate_cohomology(tasks[coh[k]], cfg); });

    CensusReport rep;
    json anomalies = json::array(), excluded = json::array(), disagreements = json::array();
    json shapes = json::object(), dims = json::object();
    std::size_t coh_run = 0, coh_skipped = 0;
    auto bump = [](json& slot) { slot = slot.is_null() ? 1 : slot.get<int>() + 1; };
    for (auto& t : tasks) {
        for (auto& a : t.anomalies) anomalies.push_back(a);
        for (auto& e : t.excluded) excluded.push_back(e);
        for (auto& d : t.disagreements) disagreements.push_back(d);
        std::string ty(1, seed_letter(t.type));
        bump(shapes[ty][t.record["shape"].get<std::string>()]);
        for (const char* mode : {"bookkeeping", "cohomology"})
            if (t.record.contains(mode)) {
                bump(dims[mode][std::to_string(t.record[mode]["dim_bound"].get<int>())]);
            }
        if (t.record.contains("cohomology")) ++coh_run;
        if (t.record.contains("cohomology_skipped")) ++coh_skipped;
        rep.records.push_back(std::move(t.record));
    }
    std::string scope = cfg.scope == CohomologyScope::None ? "none" : cfg.scope == CohomologyScope::All ? "all" : "witnesses";
    json types = json::array();
    for (SeedType t : cfg.types) types.push_back(std::string(1, seed_letter(t)));
    rep.summary = {{"config",
                    {{"types", types},
                     {"max_ops", cfg.max_ops},
                     {"max_multiplier", cfg.max_multiplier},
                     {"cross_ratio", CrossRatio::rational(cfg.cross_ratio).str()},
                     {"cohomology_scope", scope},
                     {"row_budget", cfg.row_budget}}},
                   {"classes", rep.records.size()},
                   {"shapes", shapes},
                   {"dim_bounds", dims},
                   {"cohomology_evaluated", coh_run},
                   {"cohomology_skipped", coh_skipped},
                   {"anomalies", anomalies},
                   {"excluded", excluded},
                   {"mode_disagreements", disagreements}};
    return rep;
}

} // namespace qhd
