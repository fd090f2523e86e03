#pragma once

#include "chabauty/concrete.hpp"
#include "chabauty/grammar.hpp"
#include "chabauty/parallel.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace chabauty {

/// R^d x T^t x Z^z x F from a product of R, T, Z and cyclic atoms, in any
/// order; cyclic factors keep their stated moduli.
inline ConcreteGroup concrete_group(const GroupExpr &e) {
    ConcreteGroup g{0, 0, 0, {}};
    auto rec = [&](auto &self, const GroupExpr &x) -> void {
        switch (x.kind) {
        case Kind::Prod:
            for (const auto &f : x.factors)
                self(self, f);
            return;
        case Kind::R: ++g.d; return;
        case Kind::T: ++g.t; return;
        case Kind::Z: ++g.z; return;
        case Kind::Cyclic:
            if (x.param > 1)
                g.moduli.push_back(x.param);
            return;
        default: throw Unsupported("concrete groups are products of R, T, Z and Z(m); got " + render(x));
        }
    };
    rec(rec, e);
    g.validate();
    return g;
}

inline ConcreteGroup concrete_group(std::string_view text) { return concrete_group(parse(text)); }

/// K is a ball around the identity or a finite point list; W is Ball(eps).
/// A ball K bounds the real block in Euclidean norm and every integer
/// coordinate in absolute value by rho, which keeps it compact.
struct NeighborhoodSpec {
    bool finite_k = false;
    Rational rho = 1;
    std::vector<Vec> points;
    Rational eps = Rational(1, 10);

    static NeighborhoodSpec ball(const Rational &rho, const Rational &eps) { return {false, rho, {}, eps}; }
    static NeighborhoodSpec finite(std::vector<Vec> pts, const Rational &eps) { return {true, 0, std::move(pts), eps}; }

    Rational delta() const { return eps / 4; }

    // eps + delta < 1 keeps every tested distance below the discrete gap
    void validate() const {
        if (eps <= 0 || eps >= Rational(4, 5))
            throw Unsupported("eps must lie in (0, 4/5)");
        if (!finite_k && rho <= 0)
            throw Unsupported("rho must be positive");
    }

    std::string describe() const {
        std::string k = finite_k ? "Finite(" + std::to_string(points.size()) + " points)" : "Ball(" + to_string(rho) + ")";
        return "K=" + k + ", W=Ball(" + to_string(eps) + ")";
    }
};

enum class Answer { Yes, No };
enum class Outcome { Yes, No, Borderline };

inline std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::Yes: return "Yes";
    case Outcome::No: return "No";
    default: return "Borderline";
    }
}

namespace detail {

/// Visits test points of A ∩ K as (lift, certified).  Certified points lie in
/// A ∩ K; the others lie in A within delta of K and only complete a delta-net.
inline void test_points(const ClosedSubgroupRep &a, const NeighborhoodSpec &nb, const ConcreteGroup &g,
                        const std::function<bool(const Vec &, bool)> &visit) {
    const std::size_t n = g.dim();
    if (nb.finite_k) {
        for (const auto &p : nb.points) {
            Vec x = reduce_point(p, g);
            if (member(a, x, g) && !visit(x, true))
                return;
        }
        return;
    }
    const Rational rho = nb.rho, delta = nb.delta();
    const Rational rhoSq = rho * rho;
    const Integer zr = floor(rho);
    Vec lo(n), hi(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (g.is_real(c)) {
            lo[c] = -rho;
            hi[c] = rho;
        } else if (g.is_torus(c)) {
            lo[c] = 0;
            hi[c] = 1;
        } else if (g.is_integer(c)) {
            lo[c] = Rational(-zr);
            hi[c] = Rational(zr);
        } else {
            lo[c] = 0;
            hi[c] = Rational(g.modulus(c) - 1);
        }
    }
    auto discreteOk = [&](const Vec &x) {
        for (std::size_t c = g.continuous(); c < n; ++c)
            if (x[c] < lo[c] || x[c] > hi[c])
                return false;
        return true;
    };
    auto realSq = [&](const Vec &x) {
        Rational s = 0;
        for (std::size_t c = 0; c < g.d; ++c)
            s += x[c] * x[c];
        return s;
    };
    auto cols = column_order(n, {});
    const Mat &v = a.continuous_basis;
    auto lpiv = pivots_of(a.discrete_gens, cols);
    bool stop = false;
    if (v.empty()) {
        enumerate_box(a.discrete_gens, lpiv, lo, hi, Vec(n, 0), [&](const Vec &x) {
            if (stop)
                return;
            for (std::size_t c = g.d; c < g.continuous(); ++c)
                if (x[c] >= 1)
                    return;
            if (!discreteOk(x) || realSq(x) > rhoSq)
                return;
            if (!visit(x, true))
                stop = true;
        });
        return;
    }
    auto vpiv = pivots_of(v, cols);
    Vec llo = lo, lhi = hi;
    std::vector<bool> isVPivot(n, false);
    for (auto p : vpiv)
        isVPivot[p] = true;
    for (std::size_t c = 0; c < g.continuous(); ++c) {
        if (isVPivot[c])
            continue;
        Rational smin = 0, smax = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            Rational e1 = lo[vpiv[i]] * v[i][c], e2 = hi[vpiv[i]] * v[i][c];
            smin += std::min(e1, e2);
            smax += std::max(e1, e2);
        }
        llo[c] = lo[c] - smax;
        lhi[c] = hi[c] - smin;
    }
    // moving s_i by h moves the point by at most h·max(|r_R|_1, |r_T|_inf)
    Rational spread = 0;
    for (const auto &row : v) {
        Rational r1 = 0, tmax = 0;
        for (std::size_t c = 0; c < g.continuous(); ++c) {
            if (g.is_real(c))
                r1 += abs(row[c]);
            else
                tmax = std::max(tmax, Rational(abs(row[c])));
        }
        spread += std::max(r1, tmax);
    }
    const Rational step = 2 * delta / spread;
    const Rational outerSq = (rho + delta) * (rho + delta);
    enumerate_box(a.discrete_gens, lpiv, llo, lhi, Vec(n, 0), [&](const Vec &lam) {
        if (stop || !discreteOk(lam))
            return;
        std::vector<Rational> slo(v.size()), shi(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            slo[i] = lo[vpiv[i]];
            shi[i] = hi[vpiv[i]];
        }
        if (v.size() == 1) {
            for (std::size_t c = 0; c < g.continuous(); ++c) {
                const Rational &r = v[0][c];
                if (r == 0 || c == vpiv[0])
                    continue;
                Rational e1 = (lo[c] - lam[c]) / r, e2 = (hi[c] - lam[c]) / r;
                slo[0] = std::max(slo[0], std::min(e1, e2));
                shi[0] = std::min(shi[0], std::max(e1, e2));
            }
            if (slo[0] > shi[0])
                return;
        }
        std::vector<Rational> s = slo;
        auto rec = [&](auto &self, std::size_t i) -> void {
            if (stop)
                return;
            if (i == v.size()) {
                Vec x = lam;
                for (std::size_t j = 0; j < v.size(); ++j)
                    axpy(x, s[j], v[j]);
                for (std::size_t c = g.d; c < g.continuous(); ++c)
                    if (x[c] < -delta || x[c] > 1 + delta)
                        return;
                Rational r2 = realSq(x);
                if (r2 > outerSq)
                    return;
                if (!visit(x, r2 <= rhoSq))
                    stop = true;
                return;
            }
            for (s[i] = slo[i];; s[i] += step) {
                if (s[i] > shi[i])
                    s[i] = shi[i];
                self(self, i + 1);
                if (s[i] == shi[i] || stop)
                    break;
            }
        };
        rec(rec, 0);
    });
}

struct InclusionCheck {
    Outcome outcome = Outcome::Yes;
    std::optional<Vec> point;
};

/// A ∩ K ⊆ W·B under margin semantics.
inline InclusionCheck inclusion(const ClosedSubgroupRep &a, const ClosedSubgroupRep &b, const NeighborhoodSpec &nb,
                                const ConcreteGroup &g) {
    if (contains(b, a, g))
        return {};
    const Rational eps = nb.eps, delta = nb.delta();
    const Rational inner = (eps - delta) * (eps - delta);
    const Rational outer = (eps + delta) * (eps + delta);
    Prepared pb(b, g);
    InclusionCheck res;
    test_points(a, nb, g, [&](const Vec &x, bool certified) {
        auto near = pb.nearest(x, eps + delta);
        if (near && near->distance_sq <= inner)
            return true;
        bool far = !near || near->distance_sq >= outer;
        if (far && certified) {
            res = {Outcome::No, reduce_point(x, g)};
            return false;
        }
        if (res.outcome == Outcome::Yes)
            res = {Outcome::Borderline, reduce_point(x, g)};
        return true;
    });
    return res;
}

} // namespace detail

struct UCheck {
    Outcome outcome;
    std::optional<Vec> point; // offending or borderline point
    std::string side;         // "L∩K⊆WH" or "H∩K⊆WL"
};

/// Decides L ∈ U(H; K, W) with margin delta = eps/4 without throwing.
inline UCheck in_U_check(const ClosedSubgroupRep &l, const ClosedSubgroupRep &h, const NeighborhoodSpec &nb,
                         const ConcreteGroup &g) {
    nb.validate();
    auto first = detail::inclusion(l, h, nb, g);
    if (first.outcome == Outcome::No)
        return {Outcome::No, first.point, "L∩K⊆WH"};
    auto second = detail::inclusion(h, l, nb, g);
    if (second.outcome == Outcome::No)
        return {Outcome::No, second.point, "H∩K⊆WL"};
    if (first.outcome == Outcome::Borderline)
        return {Outcome::Borderline, first.point, "L∩K⊆WH"};
    if (second.outcome == Outcome::Borderline)
        return {Outcome::Borderline, second.point, "H∩K⊆WL"};
    return {Outcome::Yes, std::nullopt, ""};
}

inline Answer in_U(const ClosedSubgroupRep &l, const ClosedSubgroupRep &h, const NeighborhoodSpec &nb,
                   const ConcreteGroup &g) {
    auto r = in_U_check(l, h, nb, g);
    if (r.outcome == Outcome::Borderline)
        throw Borderline("distance near eps at " + to_string(*r.point) + " (" + r.side + "); perturb eps");
    return r.outcome == Outcome::Yes ? Answer::Yes : Answer::No;
}

using SubgroupSequence = std::function<ClosedSubgroupRep(long)>;

struct ThresholdResult {
    bool found = false;
    long n0 = 0;
    long n_max = 0;
    std::optional<long> borderline_at; // the non-Yes index just below n0 was Borderline
    std::optional<Vec> blocking_point; // offending point at n0 - 1

    // a threshold in the upper half of the scanned range is read as no convergence
    bool settled() const { return found && n0 <= std::max(1L, n_max / 2); }
};

/// Least n0 <= nMax with in_U = Yes for every n in [n0, nMax].  A Borderline
/// at nMax itself is raised; one just below n0 is recorded.
inline ThresholdResult limit_threshold(const SubgroupSequence &seq, const ClosedSubgroupRep &target,
                                       const NeighborhoodSpec &nb, const ConcreteGroup &g, long nMax,
                                       unsigned threads = default_threads()) {
    ThresholdResult res;
    res.n_max = nMax;
    long n = nMax;
    const long chunk = std::max(1u, threads);
    while (n >= 1) {
        long lo = std::max(1L, n - chunk + 1);
        auto checks = parallel_map(
            static_cast<std::size_t>(n - lo + 1),
            [&](std::size_t i) { return in_U_check(seq(n - static_cast<long>(i)), target, nb, g); }, threads);
        for (std::size_t i = 0; i < checks.size(); ++i) {
            long idx = n - static_cast<long>(i);
            if (checks[i].outcome == Outcome::Yes)
                continue;
            if (idx == nMax) {
                if (checks[i].outcome == Outcome::Borderline)
                    throw Borderline("index " + std::to_string(nMax) + " is within the margin band at " +
                                     nb.describe() + "; perturb eps or nMax");
                return res;
            }
            res.found = true;
            res.n0 = idx + 1;
            if (checks[i].outcome == Outcome::Borderline)
                res.borderline_at = idx;
            res.blocking_point = checks[i].point;
            return res;
        }
        n = lo - 1;
    }
    res.found = true;
    res.n0 = 1;
    return res;
}

/// Built-in parameterized families.
namespace families {

inline void need(bool ok, const char *what) {
    if (!ok)
        throw Unsupported(what);
}

/// (1/n)Z on every real coordinate.
inline SubgroupSequence inv_lattice(const ConcreteGroup &g) {
    need(g.d >= 1, "inv-lattice needs a real coordinate");
    return [g](long n) {
        Mat gens;
        for (std::size_t c = 0; c < g.d; ++c)
            gens.push_back(unit(g.dim(), c, Rational(1, n)));
        return subgroup(g, gens);
    };
}

/// nZ on every real coordinate.
inline SubgroupSequence lattice(const ConcreteGroup &g) {
    need(g.d >= 1, "lattice needs a real coordinate");
    return [g](long n) {
        Mat gens;
        for (std::size_t c = 0; c < g.d; ++c)
            gens.push_back(unit(g.dim(), c, Rational(n)));
        return subgroup(g, gens);
    };
}

/// nZ for even n, (1/n)Z for odd n.
inline SubgroupSequence alternating(const ConcreteGroup &g) {
    auto even = lattice(g), odd = inv_lattice(g);
    return [even, odd](long n) { return n % 2 == 0 ? even(n) : odd(n); };
}

/// Z·(1/n, 1, ..., 1) in R x Z(m_1) x ... ; the finite-level truncation of
/// Z·(1/n, id) in R x bZ.
inline SubgroupSequence zn(const ConcreteGroup &g) {
    need(g.d == 1 && g.t == 0 && g.z == 0, "zn needs R x F");
    return [g](long n) {
        Vec v(g.dim(), 1);
        v[0] = Rational(1, n);
        return subgroup(g, {v});
    };
}

/// Graph of r -> n·r mod 1 in R x T.
inline SubgroupSequence rn(const ConcreteGroup &g) {
    need(g.d == 1 && g.t == 1 && g.z == 0 && g.k() == 0, "rn needs R x T");
    return [g](long n) { return subgroup(g, {}, {Vec{1, Rational(n)}}); };
}

/// (1/n!)Z on every real coordinate.
inline SubgroupSequence qsub_chain(const ConcreteGroup &g) {
    need(g.d >= 1, "qsub-chain needs a real coordinate");
    return [g](long n) {
        Integer f = 1;
        for (long i = 2; i <= n; ++i)
            f *= i;
        Mat gens;
        for (std::size_t c = 0; c < g.d; ++c)
            gens.push_back(unit(g.dim(), c, Rational(Integer(1), f)));
        return subgroup(g, gens);
    };
}

inline std::vector<std::string> names() { return {"inv-lattice", "lattice", "alternating", "zn", "rn", "qsub-chain"}; }

inline SubgroupSequence by_name(const std::string &name, const ConcreteGroup &g) {
    if (name == "inv-lattice")
        return inv_lattice(g);
    if (name == "lattice")
        return lattice(g);
    if (name == "alternating")
        return alternating(g);
    if (name == "zn")
        return zn(g);
    if (name == "rn")
        return rn(g);
    if (name == "qsub-chain")
        return qsub_chain(g);
    throw Unsupported("unknown sequence family: " + name);
}

} // namespace families

/// H_n ⊆ H_{n+1} for n < nMax, and the first index at which each probe point
/// belongs to the chain (0 when it never does).
struct UnionReport {
    bool increasing = true;
    std::vector<long> first_index;
};

inline UnionReport directed_union_check(const SubgroupSequence &seq, const std::vector<Vec> &probes,
                                        const ConcreteGroup &g, long nMax) {
    UnionReport r;
    r.first_index.assign(probes.size(), 0);
    std::optional<ClosedSubgroupRep> prev;
    for (long n = 1; n <= nMax; ++n) {
        auto h = seq(n);
        if (prev && !contains(h, *prev, g))
            r.increasing = false;
        for (std::size_t i = 0; i < probes.size(); ++i)
            if (r.first_index[i] == 0 && member(h, probes[i], g))
                r.first_index[i] = n;
        prev = std::move(h);
    }
    return r;
}

/// First candidate the sequence converges to at these scales.
inline std::optional<std::size_t> identify_limit(const SubgroupSequence &seq,
                                                 const std::vector<ClosedSubgroupRep> &candidates,
                                                 const NeighborhoodSpec &nb, const ConcreteGroup &g, long nMax) {
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (limit_threshold(seq, candidates[i], nb, g, nMax).settled())
            return i;
    return std::nullopt;
}

/// Points of H_n ∩ K outside the closed eps+delta ball, grouped by a
/// delta-grid cell, give the compactness argument's cluster point.
struct ClusterWitness {
    Vec center;
    std::vector<long> indices;
    std::vector<Vec> points;
};

struct SubsequenceLimits {
    std::optional<std::string> even, odd; // "trivial", "whole group" or nothing
};

struct TrivialLimitReport {
    std::vector<Outcome> outcomes; // index n-1
    ThresholdResult threshold;
    bool converges = false;
    std::optional<ClusterWitness> witness;
    bool all_index_selection = false; // the witness center is approached along every tail index
    SubsequenceLimits parity;
    std::string verdict;
};

namespace detail {

inline std::string cell_key(const Vec &x, const ConcreteGroup &g, const Rational &cell) {
    std::string key;
    for (std::size_t c = 0; c < g.dim(); ++c) {
        if (c < g.continuous()) {
            Rational v = g.is_torus(c) ? frac(x[c]) : x[c];
            key += floor(Rational(v / cell)).str();
        } else {
            key += to_string(x[c]);
        }
        key += ',';
    }
    return key;
}

inline Rational real_sq(const Vec &x, const ConcreteGroup &g) {
    Rational s = 0;
    for (std::size_t c = 0; c < g.d; ++c)
        s += x[c] * x[c];
    for (std::size_t c = g.d; c < g.continuous(); ++c)
        s += circle_dist(x[c]) * circle_dist(x[c]);
    return s;
}

} // namespace detail

inline TrivialLimitReport trivial_limit_check(const SubgroupSequence &seq, const NeighborhoodSpec &nb,
                                              const ConcreteGroup &g, long nMax,
                                              unsigned threads = default_threads()) {
    nb.validate();
    TrivialLimitReport rep;
    const auto triv = trivial_subgroup(g);
    const auto whole = whole_group(g);
    const Rational outer = (nb.eps + nb.delta()) * (nb.eps + nb.delta());
    struct PerIndex {
        Outcome outcome;
        std::vector<Vec> far;
    };
    auto per = parallel_map(
        static_cast<std::size_t>(nMax),
        [&](std::size_t i) {
            long n = static_cast<long>(i) + 1;
            auto h = seq(n);
            PerIndex p{in_U_check(h, triv, nb, g).outcome, {}};
            detail::test_points(h, nb, g, [&](const Vec &x, bool certified) {
                if (certified && norm_sq(x, g) >= outer)
                    p.far.push_back(reduce_point(x, g));
                return p.far.size() < 4096;
            });
            return p;
        },
        threads);
    for (const auto &p : per)
        rep.outcomes.push_back(p.outcome);
    rep.threshold = limit_threshold(seq, triv, nb, g, nMax, threads);
    rep.converges = rep.threshold.settled();

    const long tailStart = std::max(1L, nMax / 2);
    // cells hit by the most tail indices, then the most indices; ties go to the
    // cell nearest the identity
    std::map<std::string, std::map<long, Vec>> cells;
    for (long n = 1; n <= nMax; ++n)
        for (const auto &x : per[static_cast<std::size_t>(n - 1)].far) {
            auto &slot = cells[detail::cell_key(x, g, nb.delta())];
            auto it = slot.find(n);
            if (it == slot.end() || detail::real_sq(x, g) < detail::real_sq(it->second, g))
                slot[n] = x;
        }
    auto tailHits = [&](const std::map<long, Vec> &slot) {
        return std::distance(slot.lower_bound(tailStart), slot.end());
    };
    const std::map<long, Vec> *best = nullptr;
    Rational bestNorm = 0;
    for (const auto &[key, slot] : cells) {
        Rational nr = detail::real_sq(slot.rbegin()->second, g);
        auto rank = std::make_tuple(tailHits(slot), slot.size());
        auto bestRank = best ? std::make_tuple(tailHits(*best), best->size()) : rank;
        if (!best || rank > bestRank || (rank == bestRank && nr < bestNorm)) {
            best = &slot;
            bestNorm = nr;
        }
    }
    if (best && best->size() >= 2) {
        ClusterWitness w;
        w.center = best->rbegin()->second;
        for (const auto &[n, x] : *best) {
            w.indices.push_back(n);
            w.points.push_back(x);
        }
        // only a witness if the cell recurs along the tail
        if (w.indices.back() >= tailStart) {
            bool all = true;
            for (long n = tailStart; n <= nMax && all; ++n) {
                auto near = Prepared(seq(n), g).nearest(w.center, nb.eps);
                all = near.has_value();
            }
            rep.all_index_selection = all;
            rep.witness = std::move(w);
        }
    }

    auto sub = [&](long parity) -> SubgroupSequence {
        return [&seq, parity](long m) { return seq(2 * m - parity); };
    };
    const long half = nMax / 2;
    auto name = [&](const SubgroupSequence &s) -> std::optional<std::string> {
        if (half < 2)
            return std::nullopt;
        // an undecidable top index leaves the subsequence unnamed
        auto settles = [&](const ClosedSubgroupRep &t) {
            try {
                return limit_threshold(s, t, nb, g, half, threads).settled();
            } catch (const Borderline &) {
                return false;
            }
        };
        if (settles(triv))
            return "trivial";
        if (settles(whole))
            return "whole group";
        return std::nullopt;
    };
    rep.parity.even = name(sub(0));
    rep.parity.odd = name(sub(1));

    if (rep.converges) {
        rep.verdict = "converges-to-trivial";
    } else if (rep.parity.even && rep.parity.odd && *rep.parity.even != *rep.parity.odd) {
        rep.verdict = "divergent: even subsequence -> " + *rep.parity.even + ", odd subsequence -> " + *rep.parity.odd;
    } else {
        long from = nMax;
        while (from > 1 && rep.outcomes[static_cast<std::size_t>(from - 2)] == Outcome::No)
            --from;
        rep.verdict = "diverges from {0}: in_U fails at " + nb.describe() + " for all n in [" + std::to_string(from) +
                      ", " + std::to_string(nMax) + "]";
    }
    return rep;
}

/// A witness (a, f): Z·(a, f) meets U(R x F; [-rho,rho] x F, Ball(eps)).
struct ProbeResult {
    bool witness = false;
    Rational a;
    std::vector<std::uint64_t> f;
    std::size_t candidates = 0;
};

namespace detail {

inline std::uint64_t element_order(const std::vector<std::uint64_t> &f, const std::vector<std::uint64_t> &moduli) {
    std::uint64_t o = 1;
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::uint64_t m = moduli[i];
        std::uint64_t gi = std::gcd(f[i], m);
        o = std::lcm(o, m / gi);
    }
    return o;
}

inline std::vector<std::vector<std::uint64_t>> elements(const std::vector<std::uint64_t> &moduli) {
    std::vector<std::vector<std::uint64_t>> out{{}};
    for (auto m : moduli) {
        std::vector<std::vector<std::uint64_t>> next;
        for (const auto &e : out)
            for (std::uint64_t r = 0; r < m; ++r) {
                auto x = e;
                x.push_back(r);
                next.push_back(std::move(x));
            }
        out = std::move(next);
    }
    return out;
}

/// Every x in [-rho, rho] lies within eps of offset + step·Z.
inline bool progression_covers(const Rational &offset, const Rational &step, const Rational &rho, const Rational &eps) {
    // nearest progression points to -rho and rho, and the gap between
    Integer k0 = ceil(Rational((-rho - eps - offset) / step));
    Rational first = offset + Rational(k0) * step;
    if (first > -rho + eps)
        return false;
    if (step <= 2 * eps)
        return true;
    // with a coarse step the gap after `first` must already lie beyond rho
    return first + eps >= rho;
}

} // namespace detail

inline ProbeResult probe_integral(const std::vector<std::uint64_t> &moduli, const Rational &rho, const Rational &eps,
                                  std::uint64_t denomBound, unsigned threads = default_threads()) {
    std::uint64_t order = 1;
    for (auto m : moduli)
        order *= m;
    std::vector<Rational> as;
    for (std::uint64_t q = 1; q <= denomBound; ++q)
        for (std::uint64_t p = 1; p <= q; ++p)
            if (std::gcd(p, q) == 1)
                as.emplace_back(Integer(p), Integer(q));
    std::sort(as.begin(), as.end(), std::greater<>());
    auto elems = detail::elements(moduli);
    std::vector<std::vector<std::uint64_t>> gens;
    for (const auto &e : elems)
        if (detail::element_order(e, moduli) == order)
            gens.push_back(e);
    ProbeResult res;
    res.candidates = as.size() * elems.size();
    // largest passing a; for that a, the first generator in lexicographic order
    auto passes = parallel_map(
        as.size(),
        [&](std::size_t i) -> std::optional<std::size_t> {
            for (std::size_t j = 0; j < gens.size(); ++j) {
                bool ok = true;
                for (std::uint64_t k = 0; k < order && ok; ++k)
                    ok = detail::progression_covers(Rational(k) * as[i], Rational(order) * as[i], rho, eps);
                if (ok)
                    return j;
            }
            return std::nullopt;
        },
        threads);
    for (std::size_t i = 0; i < as.size(); ++i)
        if (passes[i]) {
            res.witness = true;
            res.a = as[i];
            res.f = gens[*passes[i]];
            return res;
        }
    return res;
}

/// Lower bound on det(s1, s2) for |s_i - e_i| <= eps.
struct IndependenceCertificate {
    Rational epsilon;
    Rational bound;
    bool valid;
};

inline IndependenceCertificate independence_obstruction(const Rational &eps) {
    if (eps <= 0)
        throw Unsupported("eps must be positive");
    if (eps >= Rational(1, 2))
        throw EpsilonTooLarge("independence needs eps < 1/2, got " + to_string(eps));
    Rational bound = (1 - eps) * (1 - eps) - eps * eps;
    return {eps, bound, bound > 0};
}

namespace detail {

/// Linear form on dual lift coordinates equal to <x, chi>.
inline Vec pairing_row(const Vec &x, const ConcreteGroup &g) {
    Vec r(g.dim(), 0);
    for (std::size_t c = 0; c < g.d; ++c)
        r[c] = x[c];
    for (std::size_t i = 0; i < g.t; ++i)
        r[g.d + g.z + i] = x[g.d + i];
    for (std::size_t i = 0; i < g.z; ++i)
        r[g.d + i] = x[g.d + g.t + i];
    std::size_t f0 = g.d + g.t + g.z;
    for (std::size_t i = 0; i < g.k(); ++i)
        r[f0 + i] = x[f0 + i] / Rational(g.moduli[i]);
    return r;
}

} // namespace detail

/// H^⊥ in the character group, from the Smith form of the integrality
/// conditions restricted to characters killing V.
inline ClosedSubgroupRep annihilator(const ClosedSubgroupRep &h, const ConcreteGroup &g) {
    const ConcreteGroup dg = dual_group(g);
    const std::size_t n = g.dim();
    Mat eqs;
    for (const auto &v : h.continuous_basis)
        eqs.push_back(detail::pairing_row(v, g));
    Mat w = nullspace(eqs, n);
    if (w.empty())
        return trivial_subgroup(dg);
    Mat forms;
    for (const auto &l : h.discrete_gens)
        forms.push_back(detail::pairing_row(l, g));
    for (std::size_t c = dg.continuous(); c < n; ++c)
        forms.push_back(unit(n, c));
    const std::size_t q = w.size();
    Mat a;
    Integer scale = 1;
    for (const auto &f : forms) {
        Vec row(q);
        for (std::size_t i = 0; i < q; ++i)
            row[i] = dot(f, w[i]);
        for (const auto &x : row)
            scale = lcm(scale, den(x));
        a.push_back(std::move(row));
    }
    IntMat ai;
    for (const auto &row : a) {
        IntVec r;
        for (const auto &x : row)
            r.push_back(num(x * scale));
        ai.push_back(std::move(r));
    }
    auto snf = smith(ai, q);
    auto column = [&](std::size_t j, const Rational &s) {
        Vec chi(n, 0);
        for (std::size_t i = 0; i < q; ++i)
            if (snf.right[i][j] != 0)
                axpy(chi, s * Rational(snf.right[i][j]), w[i]);
        return chi;
    };
    Mat cont, gens;
    for (std::size_t j = 0; j < q; ++j) {
        if (j < snf.diagonal.size())
            gens.push_back(column(j, Rational(scale, snf.diagonal[j])));
        else
            cont.push_back(column(j, 1));
    }
    return subgroup(dg, gens, cont);
}

struct DualityConsistency {
    ThresholdResult primal, dual;
    bool consistent;
};

inline DualityConsistency duality_limit_consistency(const SubgroupSequence &seq, const ClosedSubgroupRep &target,
                                                    const NeighborhoodSpec &nb, const NeighborhoodSpec &dualNb,
                                                    const ConcreteGroup &g, long nMax,
                                                    unsigned threads = default_threads()) {
    DualityConsistency r;
    r.primal = limit_threshold(seq, target, nb, g, nMax, threads);
    SubgroupSequence dseq = [&seq, &g](long n) { return annihilator(seq(n), g); };
    r.dual = limit_threshold(dseq, annihilator(target, g), dualNb, dual_group(g), nMax, threads);
    r.consistent = r.primal.settled() == r.dual.settled();
    return r;
}

/// Every subgroup of a finite group, canonical and without repeats, in
/// order of discovery from the trivial subgroup.
inline std::vector<ClosedSubgroupRep> subgroup_lattice_finite(const ConcreteGroup &g) {
    if (g.continuous() + g.z != 0)
        throw Unsupported("subgroup enumeration needs a finite group");
    std::uint64_t order = 1;
    for (auto m : g.moduli) {
        order *= m;
        if (order > 1024)
            throw TooLarge("finite group of order above 1024");
    }
    std::vector<Vec> elems;
    for (const auto &e : detail::elements(g.moduli)) {
        Vec v;
        for (auto x : e)
            v.emplace_back(Integer(x));
        elems.push_back(std::move(v));
    }
    std::vector<ClosedSubgroupRep> out{trivial_subgroup(g)};
    std::map<std::string, bool> seen{{to_string(out.front()), true}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (const auto &e : elems) {
            if (member(out[i], e, g))
                continue;
            Mat gens = out[i].discrete_gens;
            gens.push_back(e);
            auto s = subgroup(g, gens);
            auto key = to_string(s);
            if (seen.emplace(key, true).second)
                out.push_back(std::move(s));
        }
    }
    return out;
}

/// f: A -> B with f[i][j] the i-th coordinate of the image of the j-th
/// generator.  Compares Γ(-f)^⊥ with the graph {(f^(χ), χ)} of the adjoint.
inline bool graph_adjoint_check(const std::vector<std::uint64_t> &a, const std::vector<std::uint64_t> &b,
                                const std::vector<std::vector<std::int64_t>> &f) {
    if (f.size() != b.size())
        throw NotAHomomorphism("matrix needs one row per target coordinate");
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (f[i].size() != a.size())
            throw NotAHomomorphism("matrix needs one column per source coordinate");
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((static_cast<std::int64_t>(a[j]) * f[i][j]) % static_cast<std::int64_t>(b[i]) != 0)
                throw NotAHomomorphism("generator " + std::to_string(j) + " has order " + std::to_string(a[j]) +
                                       " but its image does not");
    }
    ConcreteGroup g{0, 0, 0, a};
    g.moduli.insert(g.moduli.end(), b.begin(), b.end());
    g.validate();
    const std::size_t n = g.dim();
    Mat graph;
    for (std::size_t j = 0; j < a.size(); ++j) {
        Vec v(n, 0);
        v[j] = 1;
        for (std::size_t i = 0; i < b.size(); ++i)
            v[a.size() + i] = Rational(-f[i][j]);
        graph.push_back(std::move(v));
    }
    auto perp = annihilator(subgroup(g, graph), g);
    Mat adj;
    for (std::size_t i = 0; i < b.size(); ++i) {
        Vec v(n, 0);
        v[a.size() + i] = 1;
        for (std::size_t j = 0; j < a.size(); ++j)
            v[j] = Rational(static_cast<std::int64_t>(a[j]) * f[i][j] / static_cast<std::int64_t>(b[i]));
        adj.push_back(std::move(v));
    }
    return perp == subgroup(dual_group(g), adj);
}

/// Every homomorphism between two finite groups, as matrices.
inline std::vector<std::vector<std::vector<std::int64_t>>> homomorphisms(const std::vector<std::uint64_t> &a,
                                                                        const std::vector<std::uint64_t> &b) {
    // entry (i,j) ranges over multiples of b_i / gcd(a_j, b_i)
    std::vector<std::vector<std::vector<std::int64_t>>> out{
        std::vector<std::vector<std::int64_t>>(b.size(), std::vector<std::int64_t>(a.size(), 0))};
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) {
            auto stepv = static_cast<std::int64_t>(b[i] / std::gcd(a[j], b[i]));
            std::vector<std::vector<std::vector<std::int64_t>>> next;
            for (const auto &m : out)
                for (std::int64_t v = 0; v < static_cast<std::int64_t>(b[i]); v += stepv) {
                    auto x = m;
                    x[i][j] = v;
                    next.push_back(std::move(x));
                }
            out = std::move(next);
        }
    return out;
}

/// phi(0) = {0}, phi(inf) = R, phi(r) = (1/r)Z in R.
inline ClosedSubgroupRep phi_R(const std::optional<Rational> &r) {
    ConcreteGroup g{1, 0, 0, {}};
    if (!r)
        return whole_group(g);
    if (*r < 0)
        throw Unsupported("phi_R needs r >= 0");
    if (*r == 0)
        return trivial_subgroup(g);
    return subgroup(g, {Vec{Rational(1) / *r}});
}

/// Isomorphism types of finite abelian groups of order at most maxOrder, as
/// lists of prime-power cyclic orders; the trivial group comes first.
inline std::vector<std::vector<std::uint64_t>> finite_abelian_types(std::uint64_t maxOrder) {
    std::vector<std::vector<std::uint64_t>> out;
    for (std::uint64_t n = 1; n <= maxOrder; ++n) {
        std::vector<std::vector<std::uint64_t>> acc{{}};
        for (auto [p, e] : factorize(n)) {
            std::vector<std::vector<unsigned>> parts;
            std::vector<unsigned> cur;
            auto rec = [&](auto &self, unsigned left, unsigned maxPart) -> void {
                if (left == 0) {
                    parts.push_back(cur);
                    return;
                }
                for (unsigned k = std::min(left, maxPart); k >= 1; --k) {
                    cur.push_back(k);
                    self(self, left - k, k);
                    cur.pop_back();
                }
            };
            rec(rec, e, e);
            std::vector<std::vector<std::uint64_t>> next;
            for (const auto &base : acc)
                for (const auto &part : parts) {
                    auto x = base;
                    for (auto k : part)
                        x.push_back(ipow(p, k));
                    next.push_back(std::move(x));
                }
            acc = std::move(next);
        }
        out.insert(out.end(), acc.begin(), acc.end());
    }
    return out;
}

} // namespace chabauty
