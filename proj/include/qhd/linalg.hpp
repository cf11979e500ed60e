#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qhd {

/// Sparse column: (row, value) pairs sorted by row, no explicit zeros.
template <class T>
using SparseColumn = std::vector<std::pair<int, T>>;

namespace detail {

inline void make_primitive(SparseColumn<mpz_class>& v) {
    mpz_class g = 0;
    for (auto& [r, x] : v) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) return;
    }
    if (g <= 1) return;
    for (auto& [r, x] : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

/// Returns sa*a - sb*b.
inline SparseColumn<mpz_class> combine(const mpz_class& sa, const SparseColumn<mpz_class>& a, const mpz_class& sb,
                                       const SparseColumn<mpz_class>& b) {
    SparseColumn<mpz_class> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    mpz_class t;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.emplace_back(a[i].first, sa * a[i].second);
            ++i;
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.emplace_back(b[j].first, -sb * b[j].second);
            ++j;
        } else {
            t = sa * a[i].second - sb * b[j].second;
            if (t != 0) out.emplace_back(a[i].first, t);
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace detail

/// Scales a rational column by the lcm of its denominators.
inline SparseColumn<mpz_class> clear_denominators(const SparseColumn<mpq_class>& col) {
    mpz_class l = 1;
    for (const auto& [r, x] : col) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    SparseColumn<mpz_class> out;
    out.reserve(col.size());
    for (const auto& [r, x] : col) {
        if (x == 0) continue;
        mpz_class v = x.get_num() * (l / x.get_den());
        out.emplace_back(r, v);
    }
    return out;
}

/// Exact rank by fraction-free elimination over the integers. Each incoming column is reduced
/// against stored pivots keyed by their last row; reduced columns are kept primitive.
inline std::size_t sparse_rank(const std::vector<SparseColumn<mpq_class>>& cols) {
    std::unordered_map<int, SparseColumn<mpz_class>> pivots;
    mpz_class g, fa, fb;
    for (const auto& c : cols) {
        SparseColumn<mpz_class> v = clear_denominators(c);
        detail::make_primitive(v);
        while (!v.empty()) {
            int k = v.back().first;
            auto it = pivots.find(k);
            if (it == pivots.end()) {
                pivots.emplace(k, std::move(v));
                break;
            }
            const auto& p = it->second;
            const mpz_class& a = v.back().second;
            const mpz_class& b = p.back().second;
            mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            mpz_divexact(fa.get_mpz_t(), b.get_mpz_t(), g.get_mpz_t());
            mpz_divexact(fb.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
            v = detail::combine(fa, v, fb, p);
            detail::make_primitive(v);
        }
    }
    return pivots.size();
}

/// Dense rank over Q by plain Gaussian elimination; used as a test oracle.
inline std::size_t dense_rank(std::vector<std::vector<mpq_class>> a) {
    if (a.empty()) return 0;
    const std::size_t n = a.size(), m = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < m && r < n; ++c) {
        std::size_t p = r;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r || a[i][c] == 0) continue;
            mpq_class f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < m; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

/// Solves A x = b exactly for square nonsingular A.
inline std::vector<mpq_class> solve(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> b) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw std::domain_error("singular system");
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            mpq_class f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

} // namespace qhd
