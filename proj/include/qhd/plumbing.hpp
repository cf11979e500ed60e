#pragma once

#include "qhd/graph.hpp"
#include "qhd/linalg.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace qhd {

using CycleWeights = std::map<VertexId, int>;

class CohomologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public CohomologyError {
public:
    using CohomologyError::CohomologyError;
};

/// Smallest s >= 1 with (M s)_i <= -1 for every vertex. The admissible set is closed under
/// componentwise minimum, so raising any violated coordinate from the all-ones vector
/// reaches its least element.
inline CycleWeights ample_cycle(const WeightedGraph& g) {
    if (!is_negative_definite(g)) throw CohomologyError("ample_cycle needs a negative definite graph");
    CycleWeights s;
    for (VertexId v : g.vertices()) s[v] = 1;
    auto pairing = [&](VertexId v) {
        long long t = static_cast<long long>(g.weight(v)) * s[v];
        for (VertexId u : g.neighbors(v)) t += s[u];
        return t;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (VertexId v : g.vertices()) {
            if (pairing(v) > -1) {
                ++s[v];
                changed = true;
            }
        }
    }
    return s;
}

/// Cycle from the exact solution of M x = -1 with denominators cleared.
inline CycleWeights ample_cycle_by_solve(const WeightedGraph& g) {
    if (!is_negative_definite(g)) throw CohomologyError("ample_cycle needs a negative definite graph");
    auto im = intersection_matrix(g);
    const std::size_t n = im.n();
    std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = im.entries[i][j];
    auto x = solve(a, std::vector<mpq_class>(n, -1));
    mpz_class l = 1;
    for (auto& q : x) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    CycleWeights s;
    for (std::size_t i = 0; i < n; ++i) {
        mpq_class v = x[i] * l;
        if (v <= 0 || !v.get_num().fits_sint_p()) throw CohomologyError("ample solve produced unusable entry");
        s[im.order[i]] = static_cast<int>(v.get_num().get_si());
    }
    return s;
}

inline bool is_ample(const WeightedGraph& g, const CycleWeights& s) {
    for (VertexId v : g.vertices()) {
        long long t = static_cast<long long>(g.weight(v)) * s.at(v);
        for (VertexId u : g.neighbors(v)) t += s.at(u);
        if (t > -1 || s.at(v) < 1) return false;
    }
    return true;
}

using Exponent = std::pair<int, int>;

/// Sum of c x^a y^b d/dx + c' x^a y^b d/dy in some chart.
struct TruncatedVectorField {
    std::map<Exponent, mpq_class> coeff_x;
    std::map<Exponent, mpq_class> coeff_y;
    std::string label;

    bool empty() const { return coeff_x.empty() && coeff_y.empty(); }

    static void add(std::map<Exponent, mpq_class>& m, Exponent e, const mpq_class& v) {
        if (v == 0) return;
        auto [it, fresh] = m.emplace(e, v);
        if (!fresh) {
            it->second += v;
            if (it->second == 0) m.erase(it);
        }
    }
};

/// Position of a neighbor intersection on E_i: x1 = 0, x2 = 0, x1 = 1, x1 = c.
enum class ChartCenter { Zero1 = 0, Zero2 = 1, One = 2, Cross = 3 };

/// Neighbors by ascending id fill the centers in the order above.
inline ChartCenter center_of(const WeightedGraph& g, VertexId i, VertexId j) {
    const auto& nb = g.neighbors(i);
    auto it = std::find(nb.begin(), nb.end(), j);
    if (it == nb.end()) throw CohomologyError("edge not incident");
    return static_cast<ChartCenter>(it - nb.begin());
}

inline mpq_class rational_cross_ratio(const WeightedGraph& g) {
    const auto& c = g.cross_ratio();
    if (!c) throw CohomologyError("valency-4 vertex needs a cross ratio");
    if (!c->is_rational())
        throw CohomologyError("cross ratio '" + c->str() + "' is not rational; substitute a rational test value");
    return c->value;
}

/// Global sections of the tangent sheaf on the chart neighborhood of E_i, written in chart 1 and
/// truncated at y-degree s_i - 1.
inline std::vector<TruncatedVectorField> section_basis(const WeightedGraph& g, VertexId i, const CycleWeights& s) {
    const int d = g.d(i);
    const int t = g.valency(i);
    const int si = s.at(i);
    if (t < 1 || t > 4) throw CohomologyError("section_basis needs valency 1..4");
    mpq_class c = t == 4 ? rational_cross_ratio(g) : mpq_class(0);
    std::vector<TruncatedVectorField> out;
    auto tag = [&](const std::string& fam, int a, int b) {
        return std::to_string(i) + ":" + fam + ":" + std::to_string(a) + "," + std::to_string(b);
    };
    for (int b = 1; b < si; ++b)
        for (int a = 0; a <= d * (b - 1); ++a) {
            TruncatedVectorField f;
            f.coeff_y[{a, b}] = 1;
            f.label = tag("y", a, b);
            out.push_back(std::move(f));
        }
    if (t <= 2)
        for (int b = 0; b < si; ++b)
            for (int a = 1; a <= d * b + 1; ++a) {
                TruncatedVectorField f;
                f.coeff_x[{a, b}] = 1;
                f.label = tag("x", a, b);
                out.push_back(std::move(f));
            }
    if (t == 1)
        for (int b = 0; b < si; ++b) {
            // y2^b d/dx2 pulled back to chart 1
            TruncatedVectorField f;
            f.coeff_x[{d * b + 2, b}] = -1;
            if (b + 1 < si) f.coeff_y[{d * b + 1, b + 1}] = d;
            f.label = tag("x2", 0, b);
            out.push_back(std::move(f));
        }
    if (t == 3)
        for (int b = 1; b < si; ++b)
            for (int a = 1; a <= d * b; ++a) {
                TruncatedVectorField f;
                TruncatedVectorField::add(f.coeff_x, {a + 1, b}, 1);
                TruncatedVectorField::add(f.coeff_x, {a, b}, -1);
                f.label = tag("x3", a, b);
                out.push_back(std::move(f));
            }
    if (t == 4)
        for (int b = 1; b < si; ++b)
            for (int a = 1; a <= d * b - 1; ++a) {
                TruncatedVectorField f;
                TruncatedVectorField::add(f.coeff_x, {a + 2, b}, 1);
                TruncatedVectorField::add(f.coeff_x, {a + 1, b}, -(1 + c));
                TruncatedVectorField::add(f.coeff_x, {a, b}, c);
                f.label = tag("x4", a, b);
                out.push_back(std::move(f));
            }
    return out;
}

/// Rewrites a chart-1 field of E_i in local coordinates (X along E_i, Y along the fiber) at the
/// given center.
inline TruncatedVectorField localize(const TruncatedVectorField& f, int d, ChartCenter center, const mpq_class& c) {
    if (center == ChartCenter::Zero1) return f;
    TruncatedVectorField out;
    out.label = f.label;
    if (center == ChartCenter::One || center == ChartCenter::Cross) {
        const mpq_class shift = center == ChartCenter::One ? mpq_class(1) : c;
        auto recenter = [&](const std::map<Exponent, mpq_class>& src, std::map<Exponent, mpq_class>& dst) {
            for (const auto& [e, v] : src) {
                auto [a, b] = e;
                mpz_class binom = 1;
                mpq_class pw = 1;
                std::vector<mpq_class> powers(a + 1);
                for (int k = 0; k <= a; ++k) {
                    powers[k] = pw;
                    pw *= shift;
                }
                for (int k = 0; k <= a; ++k) {
                    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(k));
                    TruncatedVectorField::add(dst, {k, b}, v * binom * powers[a - k]);
                }
            }
        };
        recenter(f.coeff_x, out.coeff_x);
        recenter(f.coeff_y, out.coeff_y);
        return out;
    }
    // chart 2: u = 1/x, v = x^d y
    for (const auto& [e, v] : f.coeff_x) {
        auto [a, b] = e;
        TruncatedVectorField::add(out.coeff_x, {d * b - a + 2, b}, -v);
        TruncatedVectorField::add(out.coeff_y, {d * b - a + 1, b + 1}, d * v);
    }
    for (const auto& [e, v] : f.coeff_y) {
        auto [a, b] = e;
        TruncatedVectorField::add(out.coeff_y, {d * b - a - d, b}, v);
    }
    for (const auto* m : {&out.coeff_x, &out.coeff_y})
        for (const auto& [e, v] : *m)
            if (e.first < 0) throw CohomologyError("pole in chart transition for " + f.label);
    return out;
}

/// Row monomial of an edge (i < j) in i's local coordinates: X^a Y^b d/dX or X^a Y^b d/dY.
struct RowKey {
    VertexId i;
    VertexId j;
    char kind;  // 'x' or 'y'
    int a;
    int b;
    auto tie() const { return std::tie(i, j, kind, a, b); }
    friend bool operator<(const RowKey& p, const RowKey& q) { return p.tie() < q.tie(); }
    friend bool operator==(const RowKey& p, const RowKey& q) { return p.tie() == q.tie(); }
};

inline bool in_window(const RowKey& k, const CycleWeights& s) {
    const int si = s.at(k.i), sj = s.at(k.j);
    if (k.kind == 'x') return k.a >= 1 && k.a <= sj - 1 && k.b >= 0 && k.b <= si - 1;
    return k.a >= 0 && k.a <= sj - 1 && k.b >= 1 && k.b <= si - 1;
}

/// Coefficients of a section of E_from at the edge point, inside the row window. Sections of the
/// larger endpoint are carried across by the swap X <-> Y.
inline std::vector<std::pair<RowKey, mpq_class>> restrict_to_edge(const WeightedGraph& g,
                                                                 const TruncatedVectorField& f, VertexId from,
                                                                 VertexId to, const CycleWeights& s) {
    const ChartCenter center = center_of(g, from, to);
    const mpq_class c = center == ChartCenter::Cross ? rational_cross_ratio(g) : mpq_class(0);
    TruncatedVectorField loc = localize(f, g.d(from), center, c);
    const VertexId lo = std::min(from, to), hi = std::max(from, to);
    const bool own = from == lo;
    std::map<RowKey, mpq_class> acc;
    auto put = [&](char kind, int a, int b, const mpq_class& v) {
        RowKey k = own ? RowKey{lo, hi, kind, a, b} : RowKey{lo, hi, kind == 'x' ? 'y' : 'x', b, a};
        if (!in_window(k, s)) return;
        auto [it, fresh] = acc.emplace(k, v);
        if (!fresh) it->second += v;
    };
    for (const auto& [e, v] : loc.coeff_x) put('x', e.first, e.second, v);
    for (const auto& [e, v] : loc.coeff_y) put('y', e.first, e.second, v);
    std::vector<std::pair<RowKey, mpq_class>> out;
    for (auto& [k, v] : acc)
        if (v != 0) out.emplace_back(k, v);
    return out;
}

struct ColumnKey {
    VertexId vertex;
    std::string label;
};

struct CechMatrix {
    std::vector<RowKey> rows;
    std::vector<ColumnKey> cols;
    std::vector<SparseColumn<mpq_class>> entries;  // one sparse column per section

    std::size_t r() const { return rows.size(); }
};

/// Closed-form row count: sum over edges of (s_j - 1) s_i + s_j (s_i - 1).
inline std::size_t row_count(const WeightedGraph& g, const CycleWeights& s) {
    std::size_t r = 0;
    for (const auto& [i, j] : g.edges())
        r += static_cast<std::size_t>((s.at(j) - 1) * s.at(i) + s.at(j) * (s.at(i) - 1));
    return r;
}

enum class AssemblyOrder { Canonical, Reversed };

inline CechMatrix cech_matrix(const WeightedGraph& g, const CycleWeights& s,
                              AssemblyOrder order = AssemblyOrder::Canonical) {
    require_valid(g);
    for (VertexId v : g.vertices())
        if (!s.count(v) || s.at(v) < 1) throw CohomologyError("cycle weights must be >= 1 on every vertex");
    CechMatrix m;
    for (const auto& [i, j] : g.edges()) {
        for (int a = 1; a < s.at(j); ++a)
            for (int b = 0; b < s.at(i); ++b) m.rows.push_back({i, j, 'x', a, b});
        for (int a = 0; a < s.at(j); ++a)
            for (int b = 1; b < s.at(i); ++b) m.rows.push_back({i, j, 'y', a, b});
    }
    if (order == AssemblyOrder::Reversed) std::reverse(m.rows.begin(), m.rows.end());
    std::map<RowKey, int> index;
    for (std::size_t k = 0; k < m.rows.size(); ++k) index[m.rows[k]] = static_cast<int>(k);
    for (VertexId i : g.vertices()) {
        if (g.valency(i) == 0) continue;  // no edge rows to restrict to
        for (const auto& f : section_basis(g, i, s)) {
            SparseColumn<mpq_class> col;
            for (VertexId j : g.neighbors(i))
                for (auto& [k, v] : restrict_to_edge(g, f, i, j, s)) col.emplace_back(index.at(k), v);
            std::sort(col.begin(), col.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
            m.cols.push_back({i, f.label});
            m.entries.push_back(std::move(col));
        }
    }
    if (order == AssemblyOrder::Reversed) {
        std::reverse(m.cols.begin(), m.cols.end());
        std::reverse(m.entries.begin(), m.entries.end());
    }
    return m;
}

/// First cohomology of the tangent sheaf on the chart neighborhood of E_i itself: the graded
/// pieces are O(2 - t_i + d_i w) for w = 0..s_i-1.
inline int vertex_h1(const WeightedGraph& g, VertexId i, const CycleWeights& s) {
    int total = 0;
    for (int w = 0; w < s.at(i); ++w) total += std::max(0, g.valency(i) - g.d(i) * w - 3);
    return total;
}

struct H1Report {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t rank = 0;
    int vertex_term = 0;
    int h1 = 0;
};

inline H1Report h1_report(const WeightedGraph& g, const CycleWeights& s,
                          AssemblyOrder order = AssemblyOrder::Canonical) {
    CechMatrix m = cech_matrix(g, s, order);
    H1Report rep;
    rep.rows = m.r();
    rep.cols = m.cols.size();
    rep.rank = sparse_rank(m.entries);
    for (VertexId v : g.vertices()) rep.vertex_term += vertex_h1(g, v, s);
    rep.h1 = static_cast<int>(rep.rows - rep.rank) + rep.vertex_term;
    return rep;
}

inline int h1_of_cycle(const WeightedGraph& g, const CycleWeights& s) { return h1_report(g, s).h1; }

inline CycleWeights scale(const CycleWeights& s, int m) {
    CycleWeights out;
    for (const auto& [v, x] : s) out[v] = m * x;
    return out;
}

struct H1LogResult {
    int value = 0;
    CycleWeights s0;
    std::vector<std::pair<int, H1Report>> samples;  // (multiplier, report)
};

/// Evaluates s = m s0 for m = 2, 3, ... and returns the first value attained at two consecutive
/// multipliers.
inline H1LogResult h1_log(const WeightedGraph& g, int max_multiplier = 8) {
    H1LogResult res;
    res.s0 = ample_cycle(g);
    for (int m = 2; m <= max_multiplier; ++m) {
        res.samples.emplace_back(m, h1_report(g, scale(res.s0, m)));
        const auto n = res.samples.size();
        if (n >= 2 && res.samples[n - 1].second.h1 == res.samples[n - 2].second.h1) {
            res.value = res.samples.back().second.h1;
            return res;
        }
    }
    throw NonConvergenceError("h1 did not stabilize up to multiplier " + std::to_string(max_multiplier));
}

inline void dump_matrix(std::ostream& os, const CechMatrix& m) {
    os << "% rows " << m.rows.size() << " cols " << m.cols.size() << "\n";
    for (std::size_t c = 0; c < m.entries.size(); ++c)
        for (const auto& [r, v] : m.entries[c]) {
            mpq_class q = v;
            q.canonicalize();
            os << r << " " << c << " " << q.get_num().get_str() << "/" << q.get_den().get_str() << "\n";
        }
}

} // namespace qhd
