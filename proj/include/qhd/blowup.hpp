#pragma once

#include "qhd/graph.hpp"

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace qhd {

enum class SeedType { A, B, C };

inline char seed_letter(SeedType t) { return t == SeedType::A ? 'A' : t == SeedType::B ? 'B' : 'C'; }

inline SeedType seed_from_letter(char c) {
    switch (c) {
    case 'A': case 'a': return SeedType::A;
    case 'B': case 'b': return SeedType::B;
    case 'C': case 'c': return SeedType::C;
    default: throw GraphError(std::string("unknown seed type '") + c + "'");
    }
}

inline const std::vector<SeedType>& all_seed_types() {
    static const std::vector<SeedType> ts{SeedType::A, SeedType::B, SeedType::C};
    return ts;
}

/// Weights of the three seed leaves.
inline std::vector<int> seed_leaves(SeedType t) {
    switch (t) {
    case SeedType::A: return {-3, -3, -3};
    case SeedType::B: return {-4, -4, -2};
    default: return {-6, -3, -2};
    }
}

/// Weight that (M) puts on the final (-1)-vertex.
inline int modification_weight(SeedType t) {
    return t == SeedType::A ? -4 : t == SeedType::B ? -3 : -2;
}

struct BlowUpOp {
    enum class Kind { B1, B2 };
    Kind kind = Kind::B1;
    VertexId a = 0;  // B2 edge endpoints as written in the history
    VertexId b = 0;

    static BlowUpOp b1() { return {}; }
    static BlowUpOp b2(VertexId x, VertexId y) { return {Kind::B2, x, y}; }

    std::string str() const {
        if (kind == Kind::B1) return "B1";
        return "B2@" + std::to_string(a) + "-" + std::to_string(b);
    }
    friend bool operator==(const BlowUpOp&, const BlowUpOp&) = default;
};

struct ConstructionHistory {
    SeedType seed = SeedType::A;
    std::vector<BlowUpOp> ops;
    bool modified = true;

    std::string str() const {
        std::string s = "seed=";
        s += seed_letter(seed);
        s += " ops=";
        for (std::size_t i = 0; i < ops.size(); ++i) s += (i ? "," : "") + ops[i].str();
        s += modified ? " mod=yes" : " mod=no";
        return s;
    }
};

inline WeightedGraph seed_graph(SeedType t) {
    WeightedGraph g;
    g.add_vertex(0, -1);
    VertexId id = 1;
    for (int w : seed_leaves(t)) {
        g.add_vertex(id, w);
        g.add_edge(0, id);
        ++id;
    }
    return g;
}

inline VertexId unique_minus_one(const WeightedGraph& g) {
    auto vs = minus_one_vertices(g);
    if (vs.empty()) throw GraphError("no (-1)-vertex");
    if (vs.size() > 1) throw GraphError("more than one (-1)-vertex");
    return vs.front();
}

inline WeightedGraph apply_b1(const WeightedGraph& g) {
    VertexId v = unique_minus_one(g);
    WeightedGraph out = g;
    VertexId w = out.next_id();
    out.set_weight(v, -2);
    out.add_vertex(w, -1);
    out.add_edge(v, w);
    return out;
}

inline WeightedGraph apply_b2(const WeightedGraph& g, VertexId x, VertexId y) {
    VertexId v = unique_minus_one(g);
    if (!g.has_edge(x, y)) throw GraphError("no edge " + std::to_string(x) + "-" + std::to_string(y));
    if (x != v && y != v) throw GraphError("edge not incident to the (-1)-vertex");
    VertexId u = (x == v) ? y : x;
    WeightedGraph out = g;
    VertexId w = out.next_id();
    out.set_weight(v, -2);
    out.set_weight(u, g.weight(u) - 1);
    out.remove_edge(v, u);
    out.add_vertex(w, -1);
    out.add_edge(v, w);
    out.add_edge(w, u);
    return out;
}

inline WeightedGraph apply_op(const WeightedGraph& g, const BlowUpOp& op) {
    return op.kind == BlowUpOp::Kind::B1 ? apply_b1(g) : apply_b2(g, op.a, op.b);
}

inline WeightedGraph apply_m(const WeightedGraph& g, SeedType t) {
    VertexId v = unique_minus_one(g);
    WeightedGraph out = g;
    out.set_weight(v, modification_weight(t));
    return out;
}

inline WeightedGraph blow_down(const WeightedGraph& g, VertexId v) {
    if (g.weight(v) != -1) throw GraphError("blow-down target does not have weight -1");
    if (g.valency(v) >= 3) throw GraphError("blow-down target has valency >= 3");
    auto nb = g.neighbors(v);
    WeightedGraph out = g;
    out.remove_vertex(v);
    for (VertexId u : nb) out.set_weight(u, out.weight(u) + 1);
    if (nb.size() == 2) out.add_edge(nb[0], nb[1]);
    return out;
}

/// The augmented graph: one (B-1) at the (-1)-vertex, then (B-2) moves along the new arm.
inline WeightedGraph augment(const WeightedGraph& g, SeedType t) {
    VertexId v = unique_minus_one(g);
    WeightedGraph out = apply_b1(g);
    int extra = t == SeedType::A ? 2 : t == SeedType::B ? 1 : 0;
    for (int k = 0; k < extra; ++k) {
        VertexId w = unique_minus_one(out);
        out = apply_b2(out, w, v);
    }
    if (out.weight(v) != modification_weight(t)) throw GraphError("augment produced unexpected weight");
    return out;
}

/// Deletes the appended chain of an augmented graph: 3, 2 or 1 vertices for A, B, C.
inline WeightedGraph minimalize(const WeightedGraph& g, SeedType t) {
    VertexId w = unique_minus_one(g);
    const std::size_t len = t == SeedType::A ? 3 : t == SeedType::B ? 2 : 1;
    const auto& nb = g.neighbors(w);
    for (VertexId base : nb) {
        if (g.weight(base) != modification_weight(t)) continue;
        std::vector<VertexId> chain{w};
        VertexId prev = w;
        bool ok = true;
        while (true) {
            const auto& here = g.neighbors(chain.back());
            std::vector<VertexId> next;
            for (VertexId u : here)
                if (u != prev && u != base) next.push_back(u);
            if (next.empty()) break;
            if (next.size() > 1 || g.weight(next[0]) != -2 || g.valency(next[0]) > 2) {
                ok = false;
                break;
            }
            prev = chain.back();
            chain.push_back(next[0]);
        }
        if (!ok || chain.size() != len) continue;
        WeightedGraph out = g;
        for (VertexId v : chain) out.remove_vertex(v);
        return out;
    }
    throw GraphError("augmented chain not present");
}

class ReplayError : public GraphError {
public:
    ReplayError(std::size_t index, const std::string& what)
        : GraphError("op " + std::to_string(index) + ": " + what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Seed, then ops, then (M) if modified. No cross ratio is attached.
inline WeightedGraph replay(const ConstructionHistory& h) {
    WeightedGraph g = seed_graph(h.seed);
    for (std::size_t i = 0; i < h.ops.size(); ++i) {
        try {
            g = apply_op(g, h.ops[i]);
        } catch (const GraphError& e) {
            throw ReplayError(i, e.what());
        }
    }
    if (h.modified) g = apply_m(g, h.seed);
    return g;
}

/// Intermediate graphs: index 0 is the seed, index k the graph after op k.
inline std::vector<WeightedGraph> replay_steps(const ConstructionHistory& h) {
    std::vector<WeightedGraph> out{seed_graph(h.seed)};
    for (std::size_t i = 0; i < h.ops.size(); ++i) {
        try {
            out.push_back(apply_op(out.back(), h.ops[i]));
        } catch (const GraphError& e) {
            throw ReplayError(i, e.what());
        }
    }
    return out;
}

/// Attaches a rational cross ratio when a valency-4 vertex is present.
inline WeightedGraph with_default_cross_ratio(WeightedGraph g, const mpq_class& c) {
    if (valency4_vertex(g)) {
        if (!g.cross_ratio()) g.set_cross_ratio(CrossRatio::rational(c));
    } else {
        g.set_cross_ratio(std::nullopt);
    }
    return g;
}

namespace detail {

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::min();

inline std::string ahu(const WeightedGraph& g, VertexId v, VertexId parent) {
    std::vector<std::string> kids;
    for (VertexId u : g.neighbors(v))
        if (u != parent) kids.push_back(ahu(g, u, v));
    std::sort(kids.begin(), kids.end());
    std::string s = "(" + std::to_string(g.weight(v));
    for (auto& k : kids) s += k;
    return s + ")";
}

inline std::vector<VertexId> centroids(const WeightedGraph& g) {
    const auto vs = g.vertices();
    const std::size_t n = vs.size();
    std::map<VertexId, std::size_t> sub;
    std::map<VertexId, std::size_t> worst;
    std::function<std::size_t(VertexId, VertexId)> dfs = [&](VertexId v, VertexId p) {
        std::size_t total = 1, big = 0;
        for (VertexId u : g.neighbors(v)) {
            if (u == p) continue;
            std::size_t s = dfs(u, v);
            total += s;
            big = std::max(big, s);
        }
        worst[v] = std::max(big, n - total);
        return total;
    };
    dfs(vs.front(), kNoVertex);
    std::size_t best = n;
    for (auto& [v, w] : worst) best = std::min(best, w);
    std::vector<VertexId> out;
    for (auto& [v, w] : worst)
        if (w == best) out.push_back(v);
    return out;
}

} // namespace detail

/// AHU encoding rooted at the tree centroid(s), minimum over centroids.
/// The cross ratio is appended verbatim.
inline std::string canonical_form(const WeightedGraph& g) {
    if (g.size() == 0) return "";
    std::string best;
    bool first = true;
    for (VertexId c : detail::centroids(g)) {
        std::string s = detail::ahu(g, c, detail::kNoVertex);
        if (first || s < best) best = s;
        first = false;
    }
    if (g.cross_ratio()) best += "|c=" + g.cross_ratio()->str();
    return best;
}

inline bool isomorphic(const WeightedGraph& a, const WeightedGraph& b) {
    return canonical_form(a) == canonical_form(b);
}

struct EnumeratedHistory {
    ConstructionHistory history;
    WeightedGraph minimal;
};

/// Every history with at most max_ops blow-ups, in depth-first order (B1 first, then B2 by
/// ascending neighbor id). Branches creating valency >= 5 or a second valency-4 vertex are pruned.
inline std::vector<EnumeratedHistory> enumerate_histories(SeedType t, int max_ops,
                                                          const mpq_class& cross_ratio = -1) {
    std::vector<EnumeratedHistory> out;
    ConstructionHistory h{t, {}, true};
    std::function<void(const WeightedGraph&)> rec = [&](const WeightedGraph& g) {
        out.push_back({h, with_default_cross_ratio(apply_m(g, t), cross_ratio)});
        if (static_cast<int>(h.ops.size()) == max_ops) return;
        VertexId v = unique_minus_one(g);
        std::vector<BlowUpOp> cands{BlowUpOp::b1()};
        for (VertexId u : g.neighbors(v)) cands.push_back(BlowUpOp::b2(v, u));
        for (const auto& op : cands) {
            WeightedGraph ng = apply_op(g, op);
            int four = 0;
            bool bad = false;
            for (VertexId x : ng.vertices()) {
                int k = ng.valency(x);
                if (k > 4) bad = true;
                if (k == 4) ++four;
            }
            if (bad || four > 1) continue;
            h.ops.push_back(op);
            rec(ng);
            h.ops.pop_back();
        }
    };
    rec(seed_graph(t));
    return out;
}

struct EnumeratedClass {
    std::string canonical;
    WeightedGraph minimal;
    ConstructionHistory witness;  // lexicographically least history encoding
    std::vector<ConstructionHistory> histories;
};

/// Distinct minimal graphs up to decorated isomorphism, sorted by canonical encoding.
inline std::vector<EnumeratedClass> enumerate(SeedType t, int max_ops, const mpq_class& cross_ratio = -1) {
    std::map<std::string, EnumeratedClass> classes;
    for (auto& e : enumerate_histories(t, max_ops, cross_ratio)) {
        std::string key = canonical_form(e.minimal);
        auto it = classes.find(key);
        if (it == classes.end()) {
            classes.emplace(key, EnumeratedClass{key, e.minimal, e.history, {e.history}});
        } else {
            it->second.histories.push_back(e.history);
            if (e.history.str() < it->second.witness.str()) {
                it->second.witness = e.history;
                it->second.minimal = e.minimal;
            }
        }
    }
    std::vector<EnumeratedClass> out;
    for (auto& [k, c] : classes) out.push_back(std::move(c));
    return out;
}

} // namespace qhd
