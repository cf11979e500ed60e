#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qhd {

using VertexId = int;
using Edge = std::pair<VertexId, VertexId>;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CrossRatio {
    enum class Kind { Rational, Anharmonic, Harmonic };
    Kind kind = Kind::Rational;
    mpq_class value;

    static CrossRatio rational(const mpq_class& q) { return {Kind::Rational, q}; }
    static CrossRatio anharmonic() { return {Kind::Anharmonic, 0}; }
    static CrossRatio harmonic() { return {Kind::Harmonic, 0}; }

    bool is_rational() const { return kind == Kind::Rational; }

    std::string str() const {
        switch (kind) {
        case Kind::Anharmonic: return "anharmonic";
        case Kind::Harmonic: return "harmonic";
        default: break;
        }
        mpq_class v = value;
        v.canonicalize();
        return v.get_num().get_str() + "/" + v.get_den().get_str();
    }

    friend bool operator==(const CrossRatio& a, const CrossRatio& b) {
        if (a.kind != b.kind) return false;
        return a.kind != Kind::Rational || a.value == b.value;
    }
};

inline Edge make_edge(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Decorated tree: vertex weights are self-intersections -d_i.
class WeightedGraph {
public:
    WeightedGraph() = default;

    void add_vertex(VertexId v, int weight) {
        if (weight_.count(v)) throw GraphError("duplicate vertex " + std::to_string(v));
        weight_[v] = weight;
        adj_[v];
    }

    void add_edge(VertexId a, VertexId b) {
        if (!weight_.count(a) || !weight_.count(b))
            throw GraphError("edge endpoint missing: " + std::to_string(a) + "-" + std::to_string(b));
        if (a == b) throw GraphError("loop at vertex " + std::to_string(a));
        if (!edges_.insert(make_edge(a, b)).second)
            throw GraphError("duplicate edge " + std::to_string(a) + "-" + std::to_string(b));
        insert_sorted(adj_[a], b);
        insert_sorted(adj_[b], a);
    }

    void remove_edge(VertexId a, VertexId b) {
        if (!edges_.erase(make_edge(a, b)))
            throw GraphError("no edge " + std::to_string(a) + "-" + std::to_string(b));
        erase_value(adj_[a], b);
        erase_value(adj_[b], a);
    }

    void remove_vertex(VertexId v) {
        auto nb = neighbors(v);
        for (VertexId u : nb) remove_edge(v, u);
        weight_.erase(v);
        adj_.erase(v);
    }

    void set_weight(VertexId v, int w) { at(weight_, v) = w; }
    void set_cross_ratio(std::optional<CrossRatio> c) { cross_ratio_ = std::move(c); }

    bool has_vertex(VertexId v) const { return weight_.count(v) > 0; }
    bool has_edge(VertexId a, VertexId b) const { return edges_.count(make_edge(a, b)) > 0; }
    int weight(VertexId v) const { return at(weight_, v); }
    /// d_i = -weight
    int d(VertexId v) const { return -weight(v); }
    const std::vector<VertexId>& neighbors(VertexId v) const { return at(adj_, v); }
    int valency(VertexId v) const { return static_cast<int>(neighbors(v).size()); }
    std::size_t size() const { return weight_.size(); }
    const std::map<VertexId, int>& weights() const { return weight_; }
    const std::set<Edge>& edges() const { return edges_; }
    const std::optional<CrossRatio>& cross_ratio() const { return cross_ratio_; }

    std::vector<VertexId> vertices() const {
        std::vector<VertexId> out;
        out.reserve(weight_.size());
        for (const auto& [v, w] : weight_) out.push_back(v);
        return out;
    }

    VertexId next_id() const { return weight_.empty() ? 0 : weight_.rbegin()->first + 1; }

    friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
        return a.weight_ == b.weight_ && a.edges_ == b.edges_ && a.cross_ratio_ == b.cross_ratio_;
    }

private:
    template <class M>
    static auto at(M& m, VertexId v) -> decltype((m.find(v)->second)) {
        auto it = m.find(v);
        if (it == m.end()) throw GraphError("unknown vertex " + std::to_string(v));
        return it->second;
    }
    static void insert_sorted(std::vector<VertexId>& xs, VertexId v) {
        xs.insert(std::lower_bound(xs.begin(), xs.end(), v), v);
    }
    static void erase_value(std::vector<VertexId>& xs, VertexId v) {
        xs.erase(std::remove(xs.begin(), xs.end(), v), xs.end());
    }

    std::map<VertexId, int> weight_;
    std::map<VertexId, std::vector<VertexId>> adj_;
    std::set<Edge> edges_;
    std::optional<CrossRatio> cross_ratio_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

inline bool is_tree(const WeightedGraph& g) {
    if (g.size() == 0) return false;
    if (g.edges().size() + 1 != g.size()) return false;
    std::set<VertexId> seen;
    std::vector<VertexId> stack{g.weights().begin()->first};
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        if (!seen.insert(v).second) continue;
        for (VertexId u : g.neighbors(v)) stack.push_back(u);
    }
    return seen.size() == g.size();
}

inline std::vector<VertexId> vertices_of_valency(const WeightedGraph& g, int k) {
    std::vector<VertexId> out;
    for (VertexId v : g.vertices())
        if (g.valency(v) == k) out.push_back(v);
    return out;
}

inline ValidationReport validate(const WeightedGraph& g) {
    ValidationReport r;
    if (!is_tree(g)) r.violations.push_back("not a tree");
    int four = 0;
    for (const auto& [v, w] : g.weights()) {
        if (w > -1) r.violations.push_back("vertex " + std::to_string(v) + " has weight " + std::to_string(w) + " > -1");
        int t = g.valency(v);
        if (t > 4) r.violations.push_back("vertex " + std::to_string(v) + " has valency " + std::to_string(t) + " > 4");
        if (t == 4) ++four;
    }
    if (four > 1) r.violations.push_back("more than one valency-4 vertex");
    const auto& c = g.cross_ratio();
    if (four >= 1 && !c) r.violations.push_back("valency-4 vertex without cross ratio");
    if (four == 0 && c) r.violations.push_back("cross ratio without valency-4 vertex");
    if (c && c->is_rational() && (c->value == 0 || c->value == 1))
        r.violations.push_back("cross ratio in {0,1}");
    return r;
}

inline void require_valid(const WeightedGraph& g) {
    auto r = validate(g);
    if (!r.ok()) throw GraphError("invalid graph: " + r.violations.front());
}

struct IntersectionMatrix {
    std::vector<VertexId> order;
    std::vector<std::vector<mpz_class>> entries;

    std::size_t n() const { return order.size(); }
};

/// Rows ordered by ascending VertexId.
inline IntersectionMatrix intersection_matrix(const WeightedGraph& g) {
    IntersectionMatrix m;
    m.order = g.vertices();
    const std::size_t n = m.order.size();
    std::map<VertexId, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) idx[m.order[i]] = i;
    m.entries.assign(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m.entries[i][i] = g.weight(m.order[i]);
    for (const auto& [a, b] : g.edges()) {
        m.entries[idx[a]][idx[b]] = 1;
        m.entries[idx[b]][idx[a]] = 1;
    }
    return m;
}

/// Bareiss fraction-free elimination with row pivoting.
inline mpz_class determinant(std::vector<std::vector<mpz_class>> a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    int sign = 1;
    mpz_class prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && a[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline mpz_class determinant(const IntersectionMatrix& m) { return determinant(m.entries); }

/// Leading principal minors via Bareiss without pivoting: the k-th pivot is the k-th minor.
/// Stops at the first vanishing minor.
inline std::vector<mpz_class> leading_minors(std::vector<std::vector<mpz_class>> a) {
    const std::size_t n = a.size();
    std::vector<mpz_class> out;
    mpz_class prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(a[k][k]);
        if (a[k][k] == 0) return out;
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = a[k][k];
    }
    return out;
}

/// Sylvester criterion: minors alternate in sign starting negative.
inline bool is_negative_definite(const IntersectionMatrix& m) {
    auto minors = leading_minors(m.entries);
    for (std::size_t k = 0; k < minors.size(); ++k) {
        int want = (k % 2 == 0) ? -1 : 1;
        if (sgn(minors[k]) != want) return false;
    }
    return true;
}

inline bool is_negative_definite(const WeightedGraph& g) {
    return is_negative_definite(intersection_matrix(g));
}

/// Vertices of valency >= 3.
inline std::set<VertexId> nodes(const WeightedGraph& g) {
    std::set<VertexId> out;
    for (VertexId v : g.vertices())
        if (g.valency(v) >= 3) out.insert(v);
    return out;
}

/// No (-1)-vertex of valency <= 2.
inline bool is_minimal(const WeightedGraph& g) {
    for (const auto& [v, w] : g.weights())
        if (w == -1 && g.valency(v) <= 2) return false;
    return true;
}

inline std::vector<VertexId> minus_one_vertices(const WeightedGraph& g) {
    std::vector<VertexId> out;
    for (const auto& [v, w] : g.weights())
        if (w == -1) out.push_back(v);
    return out;
}

inline std::optional<VertexId> valency4_vertex(const WeightedGraph& g) {
    auto v = vertices_of_valency(g, 4);
    if (v.empty()) return std::nullopt;
    return v.front();
}

} // namespace qhd
