#pragma once

#include "chabauty/classify.hpp"
#include "chabauty/corpus.hpp"
#include "chabauty/duality.hpp"
#include "chabauty/nets.hpp"

#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace chabauty {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

namespace acceptance {

using Clock = std::chrono::steady_clock;

inline Rational q(long n, long d = 1) { return Rational(n, d); }

inline CriterionResult classification_table() {
    struct Row {
        const char *group;
        Mode mode;
        bool expected;
    };
    const Row rows[] = {
        {"R", Mode::Integral, true},
        {"R^2", Mode::Integral, false},
        {"R^3", Mode::Integral, false},
        {"Q", Mode::Integral, true},
        {"Z", Mode::Integral, true},
        {"QSub{2:inf}", Mode::Integral, true},
        {"R x Z(2)^2", Mode::Integral, false},
        {"R x Z(3)^2", Mode::Integral, false},
        {"R x Z(2)^3", Mode::Integral, false},
        {"R x Z(8)", Mode::Integral, true},
        {"R x Z(9)", Mode::Integral, true},
        {"R x Prufer(2)", Mode::Integral, true},
        {"R x Prufer(3)", Mode::Integral, true},
        {"R x Zp(2)", Mode::Integral, true},
        {"R x Zp(5)", Mode::Integral, true},
        {"R x Qp(2)", Mode::Integral, true},
        {"R x Qp(3)", Mode::Integral, true},
        {"Z(2) x Z", Mode::Integral, false},
        {"Z x Z", Mode::Integral, false},
        {"R x BohrZ", Mode::Integral, true},
        {"R x T", Mode::Numeral, true},
        {"R x Sol{default inf}", Mode::Numeral, true},
        {"R x Sol{2:inf; default 0}", Mode::Numeral, true},
        {"R x BohrR", Mode::Numeral, true},
        {"R x Z(2)", Mode::Numeral, false},
    };
    CriterionResult r{1, "classification table", true, "", 0};
    std::size_t matched = 0, total = 0;
    for (const auto &row : rows) {
        ++total;
        bool got = classify(parse(row.group), row.mode).answer;
        if (got == row.expected)
            ++matched;
        else
            r.detail += std::string(r.detail.empty() ? "" : "; ") + "mismatch on " + row.group;
    }
    r.pass = matched == total;
    if (r.pass)
        r.detail = std::to_string(matched) + "/" + std::to_string(total) + " verdicts match";
    return r;
}

inline CriterionResult numeral_implies_integral(std::uint64_t seed) {
    std::size_t checked = 0, violations = 0;
    auto check = [&](const GroupExpr &g) {
        ++checked;
        if (classify_numeral(g).answer && !classify_integral(g).answer)
            ++violations;
    };
    for (const auto &g : corpus::small_corpus(3))
        check(g);
    corpus::ExprGenerator gen(seed);
    for (int i = 0; i < 10000; ++i)
        check(gen.expr(3));
    return {2, "numeral implies integral", violations == 0,
            std::to_string(checked) + " expressions, " + std::to_string(violations) + " violations", 0};
}

inline CriterionResult dual_involution(std::uint64_t seed) {
    std::size_t checked = 0, violations = 0;
    auto check = [&](const GroupExpr &g) {
        if (!dual_defined(g))
            return;
        ++checked;
        if (normalize(dual(dual(g))) != normalize(g))
            ++violations;
    };
    for (const auto &g : corpus::small_corpus(3))
        check(g);
    corpus::ExprGenerator gen(seed);
    for (int i = 0; i < 10000; ++i)
        check(gen.expr(3));
    return {3, "dual involution", violations == 0,
            std::to_string(checked) + " dualizable expressions, " + std::to_string(violations) + " violations", 0};
}

inline CriterionResult finite_duality() {
    std::size_t groups = 0, subgroups = 0, homs = 0, violations = 0;
    for (const auto &ty : finite_abelian_types(36)) {
        if (ty.empty())
            continue;
        ++groups;
        ConcreteGroup g{0, 0, 0, ty};
        Integer order = 1;
        for (auto m : ty)
            order *= m;
        auto subs = subgroup_lattice_finite(g);
        subgroups += subs.size();
        std::vector<ClosedSubgroupRep> perps;
        for (const auto &h : subs) {
            auto p = annihilator(h, g);
            if (annihilator(p, g) != h || finite_order(h, g) * finite_order(p, g) != order)
                ++violations;
            perps.push_back(std::move(p));
        }
        for (std::size_t i = 0; i < subs.size(); ++i)
            for (std::size_t j = 0; j < subs.size(); ++j)
                if (contains(subs[j], subs[i], g) != contains(perps[i], perps[j], g))
                    ++violations;
    }
    auto small = finite_abelian_types(8);
    for (const auto &a : small)
        for (const auto &b : small) {
            if (a.empty() || b.empty())
                continue;
            for (const auto &f : homomorphisms(a, b)) {
                ++homs;
                if (!graph_adjoint_check(a, b, f))
                    ++violations;
            }
        }
    std::ostringstream os;
    os << groups << " groups, " << subgroups << " subgroups, " << homs << " homomorphisms, " << violations
       << " violations";
    return {4, "finite duality", violations == 0, os.str(), 0};
}

/// The shared zn check: threshold within a factor 2 of m/(2(eps - delta)),
/// annihilators tending to {0}, and both directions consistent.
inline bool zn_check(std::uint64_t m, unsigned threads, std::string &detail) {
    ConcreteGroup g{1, 0, 0, {m}};
    auto nb = NeighborhoodSpec::ball(5, q(1, 10));
    const long nMax = 120;
    auto cons = duality_limit_consistency(families::zn(g), whole_group(g), nb, nb, g, nMax, threads);
    Rational estimate = Rational(m) / (2 * (nb.eps - nb.delta()));
    bool within = cons.primal.found && Rational(cons.primal.n0) <= 2 * estimate &&
                  2 * Rational(cons.primal.n0) >= estimate;
    SubgroupSequence dseq = [g](long n) { return annihilator(families::zn(g)(n), g); };
    auto triv = trivial_limit_check(dseq, nb, dual_group(g), nMax, threads);
    std::ostringstream os;
    os << "m=" << m << ": n0=" << (cons.primal.found ? std::to_string(cons.primal.n0) : "none") << " vs estimate "
       << to_string(estimate) << ", dual n0="
       << (cons.dual.found ? std::to_string(cons.dual.n0) : "none") << ", annihilators "
       << (triv.converges ? "-> {0}" : "do not settle") << (cons.consistent ? ", consistent" : ", INCONSISTENT");
    detail += (detail.empty() ? "" : "; ") + os.str();
    return cons.primal.settled() && within && triv.converges && cons.consistent;
}

inline CriterionResult convergence_thresholds(unsigned threads) {
    CriterionResult r{5, "convergence thresholds", true, "", 0};
    const ConcreteGroup g{1, 0, 0, {}};
    auto nb = NeighborhoodSpec::ball(10, q(1, 10));
    auto inv = limit_threshold(families::inv_lattice(g), whole_group(g), nb, g, 40, threads);
    r.pass = r.pass && inv.settled();
    r.detail = "(1/n)Z -> R from n0=" + (inv.found ? std::to_string(inv.n0) : std::string("none"));
    auto alt = trivial_limit_check(families::alternating(g), nb, g, 40, threads);
    const std::string expectVerdict = "divergent: even subsequence -> trivial, odd subsequence -> whole group";
    r.pass = r.pass && alt.verdict == expectVerdict;
    r.detail += "; alternating: " + alt.verdict;
    std::string zn;
    for (std::uint64_t m : {2, 3, 4, 6})
        r.pass = zn_check(m, threads, zn) && r.pass;
    r.detail += "; " + zn;
    return r;
}

inline CriterionResult slope_graphs(unsigned threads) {
    CriterionResult r{6, "slope graphs", true, "", 0};
    const ConcreteGroup g{1, 1, 0, {}};
    const ConcreteGroup dg = dual_group(g);
    auto nb = NeighborhoodSpec::ball(3, q(1, 4));
    const long nMax = 8;
    bool perpOk = true;
    for (long n = 1; n <= nMax; ++n)
        perpOk = perpOk && annihilator(families::rn(g)(n), g) == subgroup(dg, {Vec{q(-n), 1}});
    auto cons = duality_limit_consistency(families::rn(g), whole_group(g), nb, nb, g, nMax, threads);
    r.pass = perpOk && cons.primal.settled() && cons.dual.settled() && cons.consistent;
    std::ostringstream os;
    os << "R_n -> R x T from n0=" << (cons.primal.found ? std::to_string(cons.primal.n0) : "none")
       << "; R_n^perp = <(-n,1)> " << (perpOk ? "for n<=" + std::to_string(nMax) : "MISMATCH")
       << " -> {0} from n0=" << (cons.dual.found ? std::to_string(cons.dual.n0) : "none")
       << (cons.consistent ? "; consistent" : "; INCONSISTENT");
    r.detail = os.str();
    return r;
}

inline CriterionResult probe_cross_validation(unsigned threads) {
    CriterionResult r{7, "probe cross-validation", true, "", 0};
    const Rational rho = 3, eps = q(1, 4);
    std::size_t types = 0, agree = 0, shortAt24 = 0;
    for (const auto &ty : finite_abelian_types(24)) {
        ++types;
        std::uint64_t order = 1;
        for (auto m : ty)
            order *= m;
        // a witness step order·a <= 2·eps needs denominators up to order/(2·eps)
        auto need = static_cast<std::uint64_t>(ceil(Rational(order) / (2 * eps)));
        std::uint64_t bound = std::max<std::uint64_t>(24, need);
        std::vector<GroupExpr> fs{atoms::R()};
        for (auto m : ty)
            fs.push_back(atoms::cyclic(m));
        bool classified = classify_integral(atoms::prod(fs)).answer;
        bool found = probe_integral(ty, rho, eps, bound, threads).witness;
        if (found == classified)
            ++agree;
        else
            r.detail += "disagreement on order " + std::to_string(order) + "; ";
        if (classified && bound > 24 && !probe_integral(ty, rho, eps, 24, threads).witness)
            ++shortAt24;
    }
    bool indep = true;
    for (auto e : {q(1, 4), q(2, 5)}) {
        auto c = independence_obstruction(e);
        indep = indep && c.valid && c.bound == 1 - 2 * e;
    }
    r.pass = agree == types && indep;
    r.detail += std::to_string(agree) + "/" + std::to_string(types) +
                " types agree with denominator bound max(24, 2|F|); " + std::to_string(shortAt24) +
                " cyclic types need more than 24; independence certified for eps 1/4, 2/5: " + (indep ? "yes" : "NO");
    return r;
}

inline CriterionResult corollary_demo(unsigned threads, std::ostream *trace) {
    auto demo = demo_corollary(3, q(1, 4), 8, 400, threads);
    if (trace) {
        *trace << "  diagonal trace (rho=3, eps=1/4):\n";
        for (const auto &row : demo.rows) {
            *trace << "    i=" << row.i << " j=" << row.j << " tol=" << to_string(row.tol)
                   << " in U(whole)=" << to_string(row.whole);
            if (row.blocking)
                *trace << " blocking " << to_string(*row.blocking);
            *trace << "\n";
        }
    }
    std::string d = demo.entered_at ? "enters at i=" + std::to_string(*demo.entered_at) + " and stays through i=8"
                                    : "never settles inside the neighborhood";
    return {8, "diagonal demo", demo.stays, d, 0};
}

inline CriterionResult witness_recipes(unsigned threads) {
    CriterionResult r{9, "witness recipes", true, "", 0};
    const ConcreteGroup g{1, 0, 0, {}};
    auto plan = witness_recipe(atoms::Q());
    bool chain = plan.leaf == LeafKind::DirectedUnionOfCyclics && plan.schedule.factorial;
    Integer f = 1;
    auto seq = families::qsub_chain(g);
    for (unsigned n = 1; n <= 8 && chain; ++n) {
        f *= n;
        chain = plan.schedule.at(n) == f && seq(n) == subgroup(g, {Vec{Rational(Integer(1), f)}});
    }
    auto zplan = witness_recipe(parse("R x Z(3)"));
    std::string zn;
    bool znOk = zplan.leaf == LeafKind::ZnRecipe && zplan.modulus == 3 && zn_check(zplan.modulus, threads, zn);
    r.pass = chain && znOk;
    r.detail = std::string("Q chain ") + (chain ? "is (1/n!)Z" : "MISMATCH") + "; R x Z(3) recipe " + zn;
    return r;
}

} // namespace acceptance

/// Runs acceptance criteria 1-9; `trace` receives the diagonal demo trace.
inline std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 2026, unsigned threads = default_threads(),
                                                   std::ostream *trace = nullptr) {
    std::vector<std::function<CriterionResult()>> steps{
        [] { return acceptance::classification_table(); },
        [&] { return acceptance::numeral_implies_integral(seed); },
        [&] { return acceptance::dual_involution(seed); },
        [] { return acceptance::finite_duality(); },
        [&] { return acceptance::convergence_thresholds(threads); },
        [&] { return acceptance::slope_graphs(threads); },
        [&] { return acceptance::probe_cross_validation(threads); },
        [&] { return acceptance::corollary_demo(threads, trace); },
        [&] { return acceptance::witness_recipes(threads); },
    };
    std::vector<CriterionResult> out;
    for (auto &step : steps) {
        auto t0 = acceptance::Clock::now();
        CriterionResult r;
        try {
            r = step();
        } catch (const std::exception &e) {
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
            r.id = static_cast<int>(out.size()) + 1;
        }
        r.seconds = std::chrono::duration<double>(acceptance::Clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    // runtime budgets that are part of the criteria
    if (out[0].seconds >= 1) {
        out[0].pass = false;
        out[0].detail += " (over the 1 s budget)";
    }
    if (out[3].seconds >= 30) {
        out[3].pass = false;
        out[3].detail += " (over the 30 s budget)";
    }
    return out;
}

inline std::string format_result(const CriterionResult &r) {
    std::ostringstream os;
    os << "criterion " << r.id << " [" << r.name << "]: " << (r.pass ? "PASS" : "FAIL") << " (" << r.detail << "; "
       << std::fixed;
    os.precision(2);
    os << r.seconds << " s)";
    return os.str();
}

} // namespace chabauty
