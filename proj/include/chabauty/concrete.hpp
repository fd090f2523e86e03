#pragma once

#include "chabauty/errors.hpp"
#include "chabauty/lattice.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace chabauty {

/// R^d x T^t x Z^z x Z(m_1) x ... x Z(m_k), coordinates in that order.
struct ConcreteGroup {
    std::size_t d = 0, t = 0, z = 0;
    std::vector<std::uint64_t> moduli;

    std::size_t k() const { return moduli.size(); }
    std::size_t dim() const { return d + t + z + k(); }
    std::size_t continuous() const { return d + t; }

    bool is_real(std::size_t c) const { return c < d; }
    bool is_torus(std::size_t c) const { return c >= d && c < d + t; }
    bool is_integer(std::size_t c) const { return c >= d + t && c < d + t + z; }
    bool is_finite(std::size_t c) const { return c >= d + t + z && c < dim(); }
    std::uint64_t modulus(std::size_t c) const { return moduli[c - d - t - z]; }

    void validate() const {
        if (dim() > 6)
            throw TooLarge("concrete groups are limited to 6 coordinates");
        for (auto m : moduli)
            if (m < 2)
                throw Unsupported("finite coordinate orders must be at least 2");
    }

    bool operator==(const ConcreteGroup &) const = default;
};

/// Character group: the torus and integer blocks trade places.
inline ConcreteGroup dual_group(const ConcreteGroup &g) { return {g.d, g.z, g.t, g.moduli}; }

inline std::string describe(const ConcreteGroup &g) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < g.d; ++i)
        parts.push_back("R");
    for (std::size_t i = 0; i < g.t; ++i)
        parts.push_back("T");
    for (std::size_t i = 0; i < g.z; ++i)
        parts.push_back("Z");
    for (auto m : g.moduli)
        parts.push_back("Z(" + std::to_string(m) + ")");
    if (parts.empty())
        return "0";
    std::string s = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i)
        s += " x " + parts[i];
    return s;
}

/// Torus coordinates in [0,1), finite coordinates in [0,m).
inline Vec reduce_point(Vec x, const ConcreteGroup &g) {
    for (std::size_t c = 0; c < g.dim(); ++c) {
        if (g.is_torus(c))
            x[c] = frac(x[c]);
        else if (g.is_integer(c) && den(x[c]) != 1)
            throw Unsupported("integer coordinate with a fractional value");
        else if (g.is_finite(c)) {
            if (den(x[c]) != 1)
                throw Unsupported("finite coordinate with a fractional value");
            x[c] = Rational(mod(num(x[c]), Integer(g.modulus(c))));
        }
    }
    return x;
}

inline std::string to_string(const Vec &x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (i ? ", " : "") + to_string(x[i]);
    return s + ")";
}

/// Squared norm of the max-metric: Euclidean on R, circle distance on T, 0/1
/// on discrete coordinates.
inline Rational norm_sq(const Vec &x, const ConcreteGroup &g) {
    Rational r = 0, best = 0;
    for (std::size_t c = 0; c < g.dim(); ++c) {
        if (g.is_real(c))
            r += x[c] * x[c];
        else if (g.is_torus(c)) {
            Rational e = circle_dist(x[c]);
            best = std::max(best, Rational(e * e));
        } else if (g.is_integer(c) ? x[c] != 0 : mod(num(x[c]), Integer(g.modulus(c))) != 0) {
            best = std::max(best, Rational(1));
        }
    }
    return std::max(r, best);
}

/// A closed subgroup through its preimage V + Lambda in the coordinate lift
/// R^(d+t) x Z^(z+k).  After canonicalize: V is in reduced row echelon form,
/// the lattice contains the torus and finite kernels, is reduced modulo V and
/// is in Hermite normal form, so equal subgroups have equal data.
struct ClosedSubgroupRep {
    Mat continuous_basis;
    Mat discrete_gens;
    bool canonical = false;

    bool operator==(const ClosedSubgroupRep &) const = default;
};

inline Vec unit(std::size_t n, std::size_t c, const Rational &s = 1) {
    Vec v(n, 0);
    v[c] = s;
    return v;
}

/// Subtract V components so that every V pivot column is zero.
inline Vec reduce_mod(Vec x, const Mat &v, const std::vector<std::size_t> &pivots) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (x[pivots[i]] != 0)
            axpy(x, Rational(-x[pivots[i]]), v[i]);
    return x;
}

inline ClosedSubgroupRep canonicalize(const ClosedSubgroupRep &h, const ConcreteGroup &g) {
    const std::size_t n = g.dim();
    for (const auto &row : h.continuous_basis) {
        if (row.size() != n)
            throw Unsupported("continuous direction has the wrong length");
        for (std::size_t c = g.continuous(); c < n; ++c)
            if (row[c] != 0)
                throw Unsupported("continuous direction along a discrete coordinate");
    }
    std::vector<std::size_t> piv;
    Mat v = rref(h.continuous_basis, &piv);
    Mat gens;
    for (const auto &row : h.discrete_gens) {
        if (row.size() != n)
            throw Unsupported("generator has the wrong length");
        for (std::size_t c = g.continuous(); c < n; ++c)
            if (den(row[c]) != 1)
                throw Unsupported("generator has a fractional discrete coordinate");
        gens.push_back(reduce_mod(row, v, piv));
    }
    for (std::size_t c = g.d; c < g.continuous(); ++c)
        gens.push_back(reduce_mod(unit(n, c), v, piv));
    for (std::size_t c = g.continuous() + g.z; c < n; ++c)
        gens.push_back(unit(n, c, Rational(g.modulus(c))));
    return {std::move(v), rational_hnf(gens), true};
}

inline ClosedSubgroupRep subgroup(const ConcreteGroup &g, const Mat &gens, const Mat &continuous = {}) {
    return canonicalize({continuous, gens, false}, g);
}

inline ClosedSubgroupRep trivial_subgroup(const ConcreteGroup &g) { return subgroup(g, {}); }

inline ClosedSubgroupRep whole_group(const ConcreteGroup &g) {
    Mat cont, gens;
    for (std::size_t c = 0; c < g.continuous(); ++c)
        cont.push_back(unit(g.dim(), c));
    for (std::size_t c = g.continuous(); c < g.dim(); ++c)
        gens.push_back(unit(g.dim(), c));
    return subgroup(g, gens, cont);
}

inline std::vector<std::size_t> pivots_of(const Mat &echelon, const std::vector<std::size_t> &cols) {
    std::vector<std::size_t> p;
    for (const auto &row : echelon)
        p.push_back(leading_column(row, cols));
    return p;
}

/// Membership of a point given in lift coordinates.
inline bool member(const ClosedSubgroupRep &h, const Vec &x, const ConcreteGroup &g) {
    auto cols = column_order(g.dim(), {});
    Vec r = reduce_mod(x, h.continuous_basis, pivots_of(h.continuous_basis, cols));
    auto piv = pivots_of(h.discrete_gens, cols);
    for (std::size_t i = 0; i < h.discrete_gens.size(); ++i) {
        Rational a = r[piv[i]] / h.discrete_gens[i][piv[i]];
        if (den(a) != 1)
            return false;
        axpy(r, Rational(-a), h.discrete_gens[i]);
    }
    return is_zero(r);
}

/// a contains b.
inline bool contains(const ClosedSubgroupRep &a, const ClosedSubgroupRep &b, const ConcreteGroup &g) {
    auto piv = pivots_of(a.continuous_basis, column_order(g.dim(), {}));
    for (const auto &row : b.continuous_basis)
        if (!is_zero(reduce_mod(row, a.continuous_basis, piv)))
            return false;
    for (const auto &row : b.discrete_gens)
        if (!member(a, row, g))
            return false;
    return true;
}

inline bool is_trivial(const ClosedSubgroupRep &h, const ConcreteGroup &g) {
    return h == trivial_subgroup(g);
}

inline bool is_whole(const ClosedSubgroupRep &h, const ConcreteGroup &g) { return h == whole_group(g); }

/// Order of a subgroup of a finite group.
inline Integer finite_order(const ClosedSubgroupRep &h, const ConcreteGroup &g) {
    if (g.continuous() + g.z != 0)
        throw Unsupported("order is only defined for finite groups");
    Integer total = 1;
    for (auto m : g.moduli)
        total *= m;
    auto piv = pivots_of(h.discrete_gens, column_order(g.dim(), {}));
    Integer index = 1;
    for (std::size_t i = 0; i < piv.size(); ++i)
        index *= num(h.discrete_gens[i][piv[i]]);
    return total / index;
}

inline std::string to_string(const ClosedSubgroupRep &h) {
    std::string s = "{V:[";
    for (std::size_t i = 0; i < h.continuous_basis.size(); ++i)
        s += (i ? ", " : "") + to_string(h.continuous_basis[i]);
    s += "], L:[";
    for (std::size_t i = 0; i < h.discrete_gens.size(); ++i)
        s += (i ? ", " : "") + to_string(h.discrete_gens[i]);
    return s + "]}";
}

/// Depth-first enumeration of integer combinations of echelon rows whose
/// values at every pivot column lie in [lo, hi].  Complete because a row's
/// pivot column is untouched by all later rows.
inline void enumerate_box(const Mat &rows, const std::vector<std::size_t> &pivots, const Vec &lo, const Vec &hi,
                          const Vec &start, const std::function<void(const Vec &)> &visit) {
    Vec cur = start;
    auto rec = [&](auto &self, std::size_t i) -> void {
        if (i == rows.size()) {
            visit(cur);
            return;
        }
        auto p = pivots[i];
        const Rational &b = rows[i][p];
        Integer a0 = ceil(Rational((lo[p] - cur[p]) / b));
        Integer a1 = floor(Rational((hi[p] - cur[p]) / b));
        if (a0 > a1)
            return;
        axpy(cur, Rational(a0), rows[i]);
        for (Integer a = a0;; ++a) {
            self(self, i + 1);
            if (a == a1)
                break;
            axpy(cur, Rational(1), rows[i]);
        }
        axpy(cur, Rational(-a1), rows[i]);
    };
    rec(rec, 0);
}

namespace detail {

inline Rational max_abs(const Vec &w, std::size_t from, std::size_t to) {
    Rational m = 0;
    for (std::size_t c = from; c < to; ++c)
        m = std::max(m, abs(w[c]));
    return m;
}

/// min over s of max_c |w_c - (s·rows)_c| over columns [from,to), solved
/// exactly as a linear program by enumerating its vertices.
inline Rational linf_to_subspace(const Vec &w, const Mat &rows, std::size_t from, std::size_t to) {
    const std::size_t k = rows.size();
    if (k == 0)
        return max_abs(w, from, to);
    const std::size_t m = to - from;
    // constraint (c, sign): tau - sign*(w_c - s·r_c) >= 0, variables (s_1..s_k, tau)
    std::optional<Rational> best;
    std::vector<std::size_t> choice(k + 1);
    auto value = [&](const Vec &s) {
        Rational worst = 0;
        for (std::size_t c = from; c < to; ++c) {
            Rational e = w[c];
            for (std::size_t i = 0; i < k; ++i)
                e -= s[i] * rows[i][c];
            worst = std::max(worst, abs(e));
        }
        return worst;
    };
    auto rec = [&](auto &self, std::size_t pos, std::size_t next) -> void {
        if (pos == k + 1) {
            Mat a(k + 1, Vec(k + 1));
            Vec b(k + 1);
            for (std::size_t r = 0; r <= k; ++r) {
                std::size_t c = from + choice[r] / 2;
                int sign = choice[r] % 2 ? -1 : 1;
                // tau + sign*(s·r_c) = sign*w_c
                for (std::size_t i = 0; i < k; ++i)
                    a[r][i] = sign * rows[i][c];
                a[r][k] = 1;
                b[r] = sign * w[c];
            }
            auto sol = solve_square(a, b);
            if (!sol)
                return;
            Vec s(sol->begin(), sol->begin() + static_cast<long>(k));
            Rational v = value(s);
            if (!best || v < *best)
                best = v;
            return;
        }
        for (std::size_t j = next; j < 2 * m; ++j) {
            choice[pos] = j;
            self(self, pos + 1, j + 1);
        }
    };
    rec(rec, 0, 0);
    if (!best)
        throw InternalInconsistency("linear program without a vertex");
    return *best;
}

inline Rational euclid_to_subspace_sq(const Vec &w, const Mat &rows, std::size_t from, std::size_t to) {
    auto slice = [&](const Vec &v) { return Vec(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(to)); };
    Vec ws = slice(w);
    Rational total = dot(ws, ws);
    if (rows.empty())
        return total;
    std::size_t k = rows.size();
    Mat gram(k, Vec(k));
    Vec rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            gram[i][j] = dot(slice(rows[i]), slice(rows[j]));
        rhs[i] = dot(slice(rows[i]), ws);
    }
    auto s = solve_square(gram, rhs);
    if (!s)
        throw InternalInconsistency("dependent continuous directions");
    return total - dot(*s, rhs);
}

} // namespace detail

/// Squared max-metric distance from a lift vector w (zero on discrete
/// coordinates) to the subspace V.
inline Rational subspace_distance_sq(const Vec &w, const Mat &v, const ConcreteGroup &g) {
    const std::size_t n = g.continuous();
    if (v.size() == n)
        return 0;
    if (g.d <= 1) {
        Rational e = detail::linf_to_subspace(w, v, 0, n);
        return e * e;
    }
    Mat vr, vt;
    for (const auto &row : v) {
        bool onR = false, onT = false;
        for (std::size_t c = 0; c < n; ++c)
            if (row[c] != 0)
                (g.is_real(c) ? onR : onT) = true;
        if (onR && onT)
            throw Unsupported("distance to a subspace mixing several real and torus coordinates");
        (onR ? vr : vt).push_back(row);
    }
    Rational er = detail::euclid_to_subspace_sq(w, vr, 0, g.d);
    Rational et = detail::linf_to_subspace(w, vt, g.d, n);
    return std::max(er, Rational(et * et));
}

struct Nearest {
    Rational distance_sq;
    std::optional<Vec> point; // a closest lift when the subgroup is discrete
};

/// Distance queries against a fixed subgroup.  The lattice is re-echeloned
/// with discrete columns first so that matching the discrete coordinates of
/// a query fixes a prefix of the coefficients.
class Prepared {
public:
    Prepared(const ClosedSubgroupRep &h, const ConcreteGroup &g) : g_(g), v_(h.continuous_basis) {
        auto natural = column_order(g.dim(), {});
        vPiv_ = pivots_of(v_, natural);
        std::vector<std::size_t> order;
        for (std::size_t c = g.continuous(); c < g.dim(); ++c)
            order.push_back(c);
        for (std::size_t c = 0; c < g.continuous(); ++c)
            order.push_back(c);
        Mat rows = rational_hnf(h.discrete_gens, order);
        auto piv = pivots_of(rows, order);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (g.is_integer(piv[i]) || g.is_finite(piv[i])) {
                disc_.push_back(rows[i]);
                discPiv_.push_back(piv[i]);
            } else {
                cont_.push_back(rows[i]);
                contPiv_.push_back(piv[i]);
            }
        }
        for (auto p : vPiv_)
            isVPivot_.insert(p);
    }

    const ConcreteGroup &group() const { return g_; }

    /// Exact distance when it is at most `bound` (< 1); nullopt otherwise.
    /// `empty` reports that no lattice candidate lay in the search box.
    std::optional<Nearest> nearest(const Vec &x, const Rational &bound, bool *empty = nullptr) const {
        if (empty)
            *empty = false;
        Vec w = x;
        for (std::size_t i = 0; i < disc_.size(); ++i) {
            Rational a = w[discPiv_[i]] / disc_[i][discPiv_[i]];
            if (den(a) != 1)
                return std::nullopt;
            axpy(w, Rational(-a), disc_[i]);
        }
        for (std::size_t c = g_.continuous(); c < g_.dim(); ++c)
            if (w[c] != 0)
                return std::nullopt;
        Vec wr = reduce_mod(w, v_, vPiv_);
        Vec lo(g_.dim(), 0), hi(g_.dim(), 0);
        for (std::size_t c = 0; c < g_.continuous(); ++c) {
            if (isVPivot_.count(c))
                continue;
            Rational spread = 1;
            for (const auto &row : v_)
                spread += abs(row[c]);
            lo[c] = wr[c] - bound * spread;
            hi[c] = wr[c] + bound * spread;
        }
        std::optional<Nearest> best;
        bool any = false;
        Rational bsq = bound * bound;
        enumerate_box(cont_, contPiv_, lo, hi, Vec(g_.dim(), 0), [&](const Vec &lam) {
            any = true;
            Rational dsq = subspace_distance_sq(wr - lam, v_, g_);
            if (dsq <= bsq && (!best || dsq < best->distance_sq)) {
                std::optional<Vec> pt;
                if (v_.empty())
                    pt = x - (wr - lam);
                best = Nearest{dsq, pt};
            }
        });
        if (empty && !any && v_.empty())
            *empty = true;
        return best;
    }

private:
    ConcreteGroup g_;
    Mat v_;
    std::vector<std::size_t> vPiv_;
    Mat disc_, cont_;
    std::vector<std::size_t> discPiv_, contPiv_;
    std::set<std::size_t> isVPivot_;
};

/// Squared distance from x to h when at most `bound` (< 1); nullopt means
/// "greater than bound".
inline std::optional<Rational> dist_point(const Vec &x, const ClosedSubgroupRep &h, const ConcreteGroup &g,
                                          const Rational &bound) {
    if (bound <= 0 || bound >= 1)
        throw Unsupported("distance bound must lie in (0,1)");
    bool empty = false;
    auto r = Prepared(h, g).nearest(x, bound, &empty);
    if (empty)
        throw BoundTooSmall("no lattice point within " + to_string(bound) + " of " + to_string(x));
    if (!r)
        return std::nullopt;
    return r->distance_sq;
}

} // namespace chabauty
