#pragma once

#include "qhd/graph.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qhd {

struct ShapeClass {
    enum class Tag { Linear, Star, HShaped, KeyShaped, Other };
    Tag tag = Tag::Other;
    int node_valency = 0;  // Star only

    std::string str() const {
        switch (tag) {
        case Tag::Linear: return "Linear";
        case Tag::Star: return "Star(" + std::to_string(node_valency) + ")";
        case Tag::HShaped: return "HShaped";
        case Tag::KeyShaped: return "KeyShaped";
        default: return "Other";
        }
    }
    friend bool operator==(const ShapeClass&, const ShapeClass&) = default;
};

inline ShapeClass classify_shape(const WeightedGraph& g) {
    auto ns = nodes(g);
    std::vector<int> val;
    for (VertexId v : ns) val.push_back(g.valency(v));
    std::sort(val.begin(), val.end());
    if (ns.empty()) return {ShapeClass::Tag::Linear, 0};
    if (ns.size() == 1) return {ShapeClass::Tag::Star, val[0]};
    if (ns.size() == 2 && val == std::vector<int>{3, 3}) return {ShapeClass::Tag::HShaped, 0};
    if (ns.size() == 2 && val == std::vector<int>{3, 4}) return {ShapeClass::Tag::KeyShaped, 0};
    return {ShapeClass::Tag::Other, 0};
}

enum class Lemma { L41a, L41b, L42a, L42b, None };

inline std::string lemma_name(Lemma l) {
    switch (l) {
    case Lemma::L41a: return "L41a";
    case Lemma::L41b: return "L41b";
    case Lemma::L42a: return "L42a";
    case Lemma::L42b: return "L42b";
    default: return "None";
    }
}

struct LemmaMatch {
    Lemma lemma = Lemma::None;
    std::map<std::string, int> bindings;  // a, b, (c), d, e, path
    VertexId left_node = 0;
    VertexId right_node = 0;
    std::string note;  // why nothing matched, or which multisubset was used

    bool matched() const { return lemma != Lemma::None; }
    bool key() const { return lemma == Lemma::L42a || lemma == Lemma::L42b; }
};

inline const std::vector<std::vector<int>>& leaf_triples() {
    static const std::vector<std::vector<int>> t{{3, 3, 3}, {2, 4, 4}, {2, 3, 6}};
    return t;
}

namespace detail {

inline std::vector<VertexId> tree_path(const WeightedGraph& g, VertexId from, VertexId to) {
    std::map<VertexId, VertexId> parent{{from, from}};
    std::vector<VertexId> stack{from};
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (VertexId u : g.neighbors(v))
            if (!parent.count(u)) {
                parent[u] = v;
                stack.push_back(u);
            }
    }
    std::vector<VertexId> path{to};
    while (path.back() != from) path.push_back(parent.at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
}

/// Vertices reachable from `start` without passing through `block`.
inline std::vector<VertexId> branch(const WeightedGraph& g, VertexId start, VertexId block) {
    std::vector<VertexId> out, stack{start};
    std::map<VertexId, bool> seen{{block, true}};
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        if (seen[v]) continue;
        seen[v] = true;
        out.push_back(v);
        for (VertexId u : g.neighbors(v)) stack.push_back(u);
    }
    return out;
}

inline bool sub_multiset(std::vector<int> small, std::vector<int> big) {
    std::sort(small.begin(), small.end());
    std::sort(big.begin(), big.end());
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline std::optional<LemmaMatch> match_oriented(const WeightedGraph& g, VertexId D, VertexId N, VertexId minus1) {
    auto path = tree_path(g, D, N);
    const VertexId toward_n = path[1];
    const VertexId toward_d = path[path.size() - 2];
    std::vector<int> leaves;
    for (VertexId u : g.neighbors(D)) {
        if (u == toward_n) continue;
        if (g.valency(u) != 1 || u == minus1) return std::nullopt;
        leaves.push_back(g.d(u));
    }
    std::sort(leaves.begin(), leaves.end());
    if (g.valency(N) != 3 || D == minus1 || N == minus1) return std::nullopt;
    for (std::size_t k = 1; k + 1 < path.size(); ++k)
        if (path[k] == minus1) return std::nullopt;

    LemmaMatch m;
    m.left_node = D;
    m.right_node = N;
    const bool key = g.valency(D) == 4;
    if (key) {
        if (std::find(leaf_triples().begin(), leaf_triples().end(), leaves) == leaf_triples().end())
            return std::nullopt;
        if (g.d(D) < 3) return std::nullopt;
        m.bindings = {{"a", leaves[0]}, {"b", leaves[1]}, {"c", leaves[2]}};
    } else {
        bool ok = false;
        for (const auto& t : leaf_triples())
            if (sub_multiset(leaves, t)) {
                ok = true;
                m.note = "multisubset of (" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                         std::to_string(t[2]) + ")";
                break;
            }
        if (!ok) return std::nullopt;
        m.bindings = {{"a", leaves[0]}, {"b", leaves[1]}};
    }
    m.bindings["d"] = g.d(D);
    m.bindings["e"] = g.d(N);
    m.bindings["path"] = static_cast<int>(path.size()) - 2;

    bool leaf_on_n = false, on_arm = false;
    for (VertexId u : g.neighbors(N)) {
        if (u == toward_d) continue;
        if (u == minus1 && g.valency(u) == 1) leaf_on_n = true;
        auto arm = branch(g, u, N);
        if (std::find(arm.begin(), arm.end(), minus1) != arm.end()) on_arm = true;
    }
    if (g.d(N) == 2 && leaf_on_n) {
        m.lemma = key ? Lemma::L42b : Lemma::L41b;
    } else if (g.d(N) >= 3 && on_arm) {
        m.lemma = key ? Lemma::L42a : Lemma::L41a;
    } else {
        return std::nullopt;
    }
    return m;
}

inline std::vector<int> binding_vector(const LemmaMatch& m) {
    std::vector<int> v;
    for (const char* k : {"a", "b", "c", "d", "e", "path"}) {
        auto it = m.bindings.find(k);
        v.push_back(it == m.bindings.end() ? 0 : it->second);
    }
    return v;
}

} // namespace detail

class ShapeError : public GraphError {
public:
    using GraphError::GraphError;
};

/// Matches a non-minimal two-node graph against the four lemma diagrams. The left node carries the
/// seed leaves; the right node is -e (e >= 3) with the (-1) on one of its arms, or -2 with the (-1)
/// as a leaf.
inline LemmaMatch match_lemma(const WeightedGraph& g) {
    auto m1 = minus_one_vertices(g);
    if (m1.size() != 1) throw ShapeError("match_lemma needs a unique (-1)-vertex");
    auto ns = nodes(g);
    if (ns.size() != 2) throw ShapeError("match_lemma needs exactly two nodes");
    VertexId n1 = *ns.begin(), n2 = *ns.rbegin();
    std::optional<LemmaMatch> best;
    for (auto [D, N] : {std::pair{n1, n2}, std::pair{n2, n1}}) {
        auto m = detail::match_oriented(g, D, N, m1.front());
        if (m && (!best || detail::binding_vector(*m) < detail::binding_vector(*best))) best = m;
    }
    if (best) return *best;
    LemmaMatch none;
    for (VertexId v : ns)
        if (g.valency(v) == 4 && g.d(v) < 3)
            none.note = "valency-4 node " + std::to_string(v) + " has self-intersection " +
                        std::to_string(g.weight(v)) + " > -3";
    if (none.note.empty()) none.note = "no lemma pattern fits";
    return none;
}

inline int epsilon_of(const LemmaMatch& m) {
    if (!m.matched()) throw ShapeError("epsilon_of needs a matched lemma");
    return m.key() ? 1 : 0;
}

inline int h1_expected(const LemmaMatch& m) {
    if (!m.matched()) throw ShapeError("h1_expected needs a matched lemma");
    return m.key() ? 1 : 0;
}

} // namespace qhd
