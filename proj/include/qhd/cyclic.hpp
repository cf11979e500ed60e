#pragma once

#include "qhd/graph.hpp"

#include <optional>
#include <vector>

namespace qhd {

struct HJExpansion {
    std::vector<mpz_class> terms;
    mpz_class P;
    mpz_class Q;
};

struct QhdLinearWitness {
    mpz_class p;
    mpz_class q;
    friend bool operator==(const QhdLinearWitness&, const QhdLinearWitness&) = default;
};

/// a1 - 1/(a2 - 1/(...)) in lowest terms.
inline mpq_class evaluate_hj(const std::vector<mpz_class>& terms) {
    if (terms.empty()) throw std::invalid_argument("empty continued fraction");
    mpq_class v(terms.back());
    for (std::size_t i = terms.size() - 1; i-- > 0;) v = mpq_class(terms[i]) - 1 / v;
    v.canonicalize();
    return v;
}

inline HJExpansion hj_expand(const mpz_class& P, const mpz_class& Q) {
    if (!(P > Q && Q >= 1)) throw std::invalid_argument("hj_expand needs P > Q >= 1");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), P.get_mpz_t(), Q.get_mpz_t());
    if (g != 1) throw std::invalid_argument("hj_expand needs gcd(P,Q) = 1");
    HJExpansion e{{}, P, Q};
    mpz_class a = P, b = Q;
    while (b != 0) {
        // a/b = k - r/b with 0 <= r < b, i.e. k = ceil(a/b)
        mpz_class k;
        mpz_cdiv_q(k.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        e.terms.push_back(k);
        mpz_class r = k * b - a;
        a = b;
        b = r;
    }
    return e;
}

/// Linear graph with weights -a_1, ..., -a_k on vertices 1..k.
inline WeightedGraph chain_graph(const std::vector<mpz_class>& terms) {
    WeightedGraph g;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!terms[i].fits_sint_p()) throw std::invalid_argument("chain term out of range");
        g.add_vertex(static_cast<VertexId>(i + 1), -static_cast<int>(terms[i].get_si()));
        if (i) g.add_edge(static_cast<VertexId>(i), static_cast<VertexId>(i + 1));
    }
    return g;
}

inline WeightedGraph chain_graph(const HJExpansion& e) { return chain_graph(e.terms); }

inline bool is_linear(const WeightedGraph& g) {
    if (!is_tree(g)) return false;
    for (VertexId v : g.vertices())
        if (g.valency(v) > 2) return false;
    return true;
}

/// Vertices of a linear graph from the end with the smaller id.
inline std::vector<VertexId> chain_order(const WeightedGraph& g) {
    auto vs = g.vertices();
    if (vs.size() == 1) return vs;
    VertexId start = -1;
    bool found = false;
    for (VertexId v : vs)
        if (g.valency(v) == 1 && (!found || v < start)) {
            start = v;
            found = true;
        }
    std::vector<VertexId> out{start};
    VertexId prev = start;
    while (out.size() < vs.size()) {
        VertexId cur = out.back();
        for (VertexId u : g.neighbors(cur))
            if (u != prev) {
                prev = cur;
                out.push_back(u);
                break;
            }
    }
    return out;
}

inline std::optional<QhdLinearWitness> recognize_terms(const std::vector<mpz_class>& terms) {
    mpq_class v = evaluate_hj(terms);
    mpz_class P = v.get_num(), Q = v.get_den();
    if (mpz_perfect_square_p(P.get_mpz_t()) == 0) return std::nullopt;
    mpz_class p;
    mpz_sqrt(p.get_mpz_t(), P.get_mpz_t());
    mpz_class num = Q + 1;
    if (!mpz_divisible_p(num.get_mpz_t(), p.get_mpz_t())) return std::nullopt;
    mpz_class q = num / p;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    if (g != 1 || q <= 0 || q >= p) return std::nullopt;
    return QhdLinearWitness{p, q};
}

struct LinearRecognition {
    std::optional<QhdLinearWitness> witness;  // read from the smaller-id end when it matches
    std::optional<QhdLinearWitness> mirror;   // read from the other end
};

/// Both orientations are tried; the reading from the smaller-id end takes precedence.
inline LinearRecognition recognize_qhd_linear_both(const WeightedGraph& g) {
    if (!is_linear(g)) throw GraphError("recognize_qhd_linear needs a linear graph");
    std::vector<mpz_class> terms;
    for (VertexId v : chain_order(g)) {
        if (g.weight(v) > -2) throw GraphError("recognize_qhd_linear needs weights <= -2");
        terms.emplace_back(-g.weight(v));
    }
    std::vector<mpz_class> rev(terms.rbegin(), terms.rend());
    LinearRecognition r{recognize_terms(terms), recognize_terms(rev)};
    if (!r.witness && r.mirror) std::swap(r.witness, r.mirror);
    return r;
}

inline std::optional<QhdLinearWitness> recognize_qhd_linear(const WeightedGraph& g) {
    return recognize_qhd_linear_both(g).witness;
}

} // namespace qhd
