#pragma once

#include "chabauty/rational.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace chabauty {

using Vec = std::vector<Rational>;
using IntVec = std::vector<Integer>;
using Mat = std::vector<Vec>;
using IntMat = std::vector<IntVec>;

inline bool is_zero(const Vec &v) {
    return std::all_of(v.begin(), v.end(), [](const Rational &x) { return x == 0; });
}

inline bool is_zero(const IntVec &v) {
    return std::all_of(v.begin(), v.end(), [](const Integer &x) { return x == 0; });
}

inline Vec operator+(Vec a, const Vec &b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += b[i];
    return a;
}

inline Vec operator-(Vec a, const Vec &b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] -= b[i];
    return a;
}

inline Vec operator*(const Rational &s, Vec a) {
    for (auto &x : a)
        x *= s;
    return a;
}

/// a += s*b
inline void axpy(Vec &a, const Rational &s, const Vec &b) {
    if (s == 0)
        return;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] != 0)
            a[i] += s * b[i];
}

inline Rational dot(const Vec &a, const Vec &b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

/// Identity permutation when `order` is empty.
inline std::vector<std::size_t> column_order(std::size_t n, const std::vector<std::size_t> &order) {
    if (!order.empty())
        return order;
    std::vector<std::size_t> o(n);
    std::iota(o.begin(), o.end(), 0);
    return o;
}

/// Reduced row echelon form with zero rows dropped; pivots are 1 and every
/// pivot column is zero outside its row.
inline Mat rref(Mat rows, std::vector<std::size_t> *pivots = nullptr) {
    if (pivots)
        pivots->clear();
    if (rows.empty())
        return rows;
    std::size_t n = rows.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] == 0)
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[r], rows[p]);
        Rational inv = Rational(1) / rows[r][c];
        for (auto &x : rows[r])
            x *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i][c] != 0)
                axpy(rows[i], Rational(-rows[i][c]), rows[r]);
        if (pivots)
            pivots->push_back(c);
        ++r;
    }
    rows.resize(r);
    return rows;
}

/// Basis of {x : rows·x = 0}.
inline Mat nullspace(const Mat &rows, std::size_t n) {
    std::vector<std::size_t> piv;
    Mat r = rref(rows, &piv);
    std::vector<bool> isPivot(n, false);
    for (auto p : piv)
        isPivot[p] = true;
    Mat basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (isPivot[f])
            continue;
        Vec v(n, 0);
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i)
            v[piv[i]] = -r[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Unique solution of a square system, or nullopt when singular.
inline std::optional<Vec> solve_square(Mat a, Vec b) {
    std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0)
            ++p;
        if (p == n)
            return std::nullopt;
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0)
                continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j)
                a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = b[i] / a[i][i];
    return x;
}

/// Row-style Hermite normal form with respect to a column order: rows are in
/// echelon form, pivots positive, entries above a pivot lie in [0, pivot), and
/// zero rows are dropped.  The result depends only on the row lattice.
inline IntMat hnf(IntMat rows, const std::vector<std::size_t> &order = {}) {
    if (rows.empty())
        return rows;
    auto cols = column_order(rows.front().size(), order);
    std::size_t r = 0;
    std::vector<std::size_t> pivotCol;
    for (auto c : cols) {
        if (r == rows.size())
            break;
        for (;;) {
            std::size_t best = rows.size();
            for (std::size_t i = r; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (best == rows.size() || boost::multiprecision::abs(rows[i][c]) <
                                                                   boost::multiprecision::abs(rows[best][c])))
                    best = i;
            if (best == rows.size())
                break;
            std::swap(rows[r], rows[best]);
            bool clean = true;
            for (std::size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0)
                    continue;
                Integer q = floor_div(rows[i][c], rows[r][c]);
                for (std::size_t j = 0; j < rows[i].size(); ++j)
                    rows[i][j] -= q * rows[r][j];
                if (rows[i][c] != 0)
                    clean = false;
            }
            if (clean)
                break;
        }
        if (r < rows.size() && rows[r][c] != 0) {
            if (rows[r][c] < 0)
                for (auto &x : rows[r])
                    x = -x;
            for (std::size_t i = 0; i < r; ++i) {
                Integer q = floor_div(rows[i][c], rows[r][c]);
                if (q != 0)
                    for (std::size_t j = 0; j < rows[i].size(); ++j)
                        rows[i][j] -= q * rows[r][j];
            }
            pivotCol.push_back(c);
            ++r;
        }
    }
    rows.resize(r);
    return rows;
}

/// Hermite normal form of a rational row lattice, via a common-denominator
/// scaling.  Scaling commutes with the integer form, so the output is canonical.
inline Mat rational_hnf(const Mat &rows, const std::vector<std::size_t> &order = {}) {
    if (rows.empty())
        return rows;
    Integer l = 1;
    for (const auto &row : rows)
        for (const auto &x : row)
            l = lcm(l, den(x));
    IntMat ints;
    for (const auto &row : rows) {
        IntVec v;
        for (const auto &x : row)
            v.push_back(num(x * l));
        if (!is_zero(v))
            ints.push_back(std::move(v));
    }
    Mat out;
    for (const auto &row : hnf(std::move(ints), order)) {
        Vec v;
        for (const auto &x : row)
            v.push_back(Rational(x, l));
        out.push_back(std::move(v));
    }
    return out;
}

/// First nonzero column of `row` in the given column order.
inline std::size_t leading_column(const Vec &row, const std::vector<std::size_t> &cols) {
    for (auto c : cols)
        if (row[c] != 0)
            return c;
    return row.size();
}

struct SmithForm {
    std::vector<Integer> diagonal; // nonzero invariant factors, each dividing the next
    IntMat right;                  // unimodular Q with U·A·Q diagonal
};

/// Smith normal form, tracking only the column transform.
inline SmithForm smith(IntMat a, std::size_t cols) {
    std::size_t m = a.size();
    IntMat q(cols, IntVec(cols, 0));
    for (std::size_t i = 0; i < cols; ++i)
        q[i][i] = 1;
    auto colOp = [&](std::size_t dst, std::size_t src, const Integer &f) {
        for (std::size_t i = 0; i < m; ++i)
            a[i][dst] -= f * a[i][src];
        for (std::size_t i = 0; i < cols; ++i)
            q[i][dst] -= f * q[i][src];
    };
    auto colSwap = [&](std::size_t x, std::size_t y) {
        for (std::size_t i = 0; i < m; ++i)
            std::swap(a[i][x], a[i][y]);
        for (std::size_t i = 0; i < cols; ++i)
            std::swap(q[i][x], q[i][y]);
    };
    auto colNeg = [&](std::size_t x) {
        for (std::size_t i = 0; i < m; ++i)
            a[i][x] = -a[i][x];
        for (std::size_t i = 0; i < cols; ++i)
            q[i][x] = -q[i][x];
    };
    std::vector<Integer> diag;
    for (std::size_t t = 0; t < std::min(m, cols); ++t) {
        for (;;) {
            // smallest nonzero entry of the trailing block becomes the pivot
            std::size_t pr = m, pc = cols;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < cols; ++j)
                    if (a[i][j] != 0 && (pr == m || boost::multiprecision::abs(a[i][j]) <
                                                        boost::multiprecision::abs(a[pr][pc]))) {
                        pr = i;
                        pc = j;
                    }
            if (pr == m)
                return {diag, q};
            std::swap(a[t], a[pr]);
            colSwap(t, pc);
            bool done = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (a[i][t] == 0)
                    continue;
                Integer f = floor_div(a[i][t], a[t][t]);
                for (std::size_t j = t; j < cols; ++j)
                    a[i][j] -= f * a[t][j];
                if (a[i][t] != 0)
                    done = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0)
                    continue;
                colOp(j, t, floor_div(a[t][j], a[t][t]));
                if (a[t][j] != 0)
                    done = false;
            }
            if (!done)
                continue;
            // divisibility: fold an offending row into the pivot row and retry
            std::size_t bad = m;
            for (std::size_t i = t + 1; i < m && bad == m; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad == m)
                break;
            for (std::size_t j = t; j < cols; ++j)
                a[t][j] += a[bad][j];
        }
        if (a[t][t] < 0)
            colNeg(t);
        diag.push_back(a[t][t]);
    }
    return {diag, q};
}

} // namespace chabauty
