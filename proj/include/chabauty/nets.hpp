#pragma once

#include "chabauty/chabauty_lab.hpp"

#include <optional>
#include <vector>

namespace chabauty {

struct DiagonalPick {
    long i;
    long j;
};

/// j(i) = least j <= jMax with within(eval(i,j), rowLimit(i), tol(i)), rows
/// searched independently and merged by row index.  Every space used here is
/// first countable, so this diagonal replaces the lexicographic subnet.
template <class Eval, class Limit, class Within, class Tol>
std::vector<DiagonalPick> diagonal_subsequence(Eval eval, Limit rowLimit, Within within, Tol tol, long iMax,
                                               long jMax, unsigned threads = default_threads()) {
    auto js = parallel_map(
        static_cast<std::size_t>(iMax),
        [&](std::size_t idx) {
            long i = static_cast<long>(idx) + 1;
            auto r = rowLimit(i);
            auto t = tol(i);
            for (long j = 1; j <= jMax; ++j)
                if (within(eval(i, j), r, t))
                    return j;
            throw RowDivergent(static_cast<int>(i));
        },
        threads);
    std::vector<DiagonalPick> out;
    for (std::size_t idx = 0; idx < js.size(); ++idx)
        out.push_back({static_cast<long>(idx) + 1, js[idx]});
    return out;
}

/// One diagonal row with its distances to the row limit and the overall limit.
struct MetricDiagonalRow {
    long i, j;
    Rational tol;
    Rational to_row_limit;
    Rational row_deviation;
    Rational to_limit;
};

/// Diagonal in a metric space; distance(x_(i,j(i)), r) <= tol(i) + d(r_i, r).
template <class Eval, class Limit, class Point, class Dist, class Tol>
std::vector<MetricDiagonalRow> metric_diagonal(Eval eval, Limit rowLimit, const Point &limit, Dist dist, Tol tol,
                                               long iMax, long jMax) {
    auto picks = diagonal_subsequence(
        eval, rowLimit, [&](const Point &x, const Point &r, const Rational &t) { return dist(x, r) <= t; }, tol, iMax,
        jMax, 1);
    std::vector<MetricDiagonalRow> rows;
    for (auto [i, j] : picks) {
        auto x = eval(i, j);
        auto r = rowLimit(i);
        rows.push_back({i, j, tol(i), dist(x, r), dist(r, limit), dist(x, limit)});
    }
    return rows;
}

/// Cyclic approximants Z·(1/j, i/j) of the slope-i line in R x T, pushed
/// through the diagonal and checked against the whole group.
struct CorollaryDemo {
    Rational rho, eps;
    long i_max = 0;
    struct Row {
        long i, j;
        Rational tol;
        Outcome whole;
        std::optional<Vec> blocking;
    };
    std::vector<Row> rows;
    std::optional<long> entered_at; // least i0 with every row in [i0, iMax] inside U(G; K, W)
    bool stays = false;
};

inline ConcreteGroup real_times_torus() { return {1, 1, 0, {}}; }

/// Row tolerance: half the target eps on every row, leaving the other half
/// for the distance from the row limit to the whole group.
inline Rational demo_tolerance(const Rational &eps, long) { return eps / 2; }

inline CorollaryDemo demo_corollary(const Rational &rho, const Rational &eps, long iMax, long jMax = 400,
                                    unsigned threads = default_threads()) {
    const auto g = real_times_torus();
    auto eval = [g](long i, long j) { return subgroup(g, {Vec{Rational(1, j), Rational(i, j)}}); };
    auto rowLimit = families::rn(g);
    auto within = [&](const ClosedSubgroupRep &x, const ClosedSubgroupRep &r, const Rational &t) {
        return in_U_check(x, r, NeighborhoodSpec::ball(rho, t), g).outcome == Outcome::Yes;
    };
    auto tol = [&](long i) { return demo_tolerance(eps, i); };
    auto picks = diagonal_subsequence(eval, rowLimit, within, tol, iMax, jMax, threads);
    CorollaryDemo demo{rho, eps, iMax, {}, std::nullopt, false};
    const auto whole = whole_group(g);
    auto checks = parallel_map(
        picks.size(),
        [&](std::size_t k) {
            return in_U_check(eval(picks[k].i, picks[k].j), whole, NeighborhoodSpec::ball(rho, eps), g);
        },
        threads);
    for (std::size_t k = 0; k < picks.size(); ++k)
        demo.rows.push_back({picks[k].i, picks[k].j, tol(picks[k].i), checks[k].outcome, checks[k].point});
    for (long i = iMax; i >= 1 && demo.rows[static_cast<std::size_t>(i - 1)].whole == Outcome::Yes; --i)
        demo.entered_at = i;
    demo.stays = demo.entered_at.has_value();
    return demo;
}

/// Equivalence between "(a) every convergent selection along a
/// subsequence tends to e" and "(b) the sequence converges to {e}".
struct EquivalenceReport {
    std::vector<NeighborhoodSpec> scales;
    std::vector<TrivialLimitReport> per_scale;
    bool a_holds = true;       // no cluster witness at any scale
    bool b_holds = true;       // in_U against {e} eventually Yes at every scale
    bool a_prime_holds = true; // no witness approached along all tail indices
    bool agree = true;
};

inline EquivalenceReport trivial_limit_equivalence(const SubgroupSequence &seq, const ConcreteGroup &g,
                                                   const std::vector<NeighborhoodSpec> &scales, long nMax,
                                                   unsigned threads = default_threads()) {
    EquivalenceReport r;
    r.scales = scales;
    for (const auto &nb : scales) {
        auto rep = trivial_limit_check(seq, nb, g, nMax, threads);
        if (rep.witness)
            r.a_holds = false;
        if (rep.witness && rep.all_index_selection)
            r.a_prime_holds = false;
        if (!rep.converges)
            r.b_holds = false;
        r.per_scale.push_back(std::move(rep));
    }
    r.agree = r.a_holds == r.b_holds;
    return r;
}

} // namespace chabauty
