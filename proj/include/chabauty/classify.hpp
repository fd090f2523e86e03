#pragma once

#include "chabauty/errors.hpp"
#include "chabauty/grammar.hpp"
#include "chabauty/structure.hpp"
#include "chabauty/verdict.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace chabauty {

namespace detail {

inline bool is_subgroup_of_q_atom(const GroupExpr &n) {
    return n.kind == Kind::Z || n.kind == Kind::Q || n.kind == Kind::QSub;
}

} // namespace detail

/// Is g approximable by subgroups isomorphic to Z in its Chabauty space?
inline Verdict classify_integral(const GroupExpr &g) {
    auto n = normalize(g);
    Verdict v;
    if (n.is_trivial()) {
        v.step("nonsingleton", "nonsingleton", "the trivial group has no integral subgroups");
        return v;
    }
    auto report = flags(n);
    if (report.flags.discrete) {
        v.answer = detail::is_subgroup_of_q_atom(n);
        if (v.answer) {
            v.step("discrete-branch", "discrete-case", render(n) + " is discrete and a nonsingleton subgroup of Q");
        } else {
            bool has_z = false;
            for (const auto &a : factors_of(n))
                has_z |= a.kind == Kind::Z;
            v.step("discrete-branch", "discrete-case",
                   has_z ? render(n) + " is A x Z with A nontrivial, so it is not a subgroup of Q"
                         : render(n) + " is discrete but not isomorphic to a subgroup of Q");
        }
        return v;
    }
    auto [rank, h] = vector_split(n);
    if (rank == 0) {
        v.step("identity-component", "compact-identity-component",
               "identity component " + render(report.identity_component) +
                   " is compact but the group is not discrete");
        return v;
    }
    if (rank >= 2) {
        v.step("vector-rank", "vector-rank", "vectorRank=" + std::to_string(rank) + ", but only R^1 is approximable");
        return v;
    }
    v.step("vector-split", "r-times-comp", "G = R x " + render(h));
    auto comp = comp_part(h);
    if (comp != h) {
        v.step("comp-part", "r-times-comp", "comp(H) = " + render(comp) + " differs from H = " + render(h));
        return v;
    }
    auto q = quotient_mod_g0(h);
    auto im = is_inductively_monothetic(q);
    if (!im.answer || !(im.clause == "3" || im.clause == "trivial")) {
        std::string why = im.trace.empty() ? std::string() : im.trace.back().detail;
        v.step("quotient", "periodic-quotient", "G/G0 = " + render(q) + " is not periodic inductively monothetic: " + why);
        return v;
    }
    v.answer = true;
    v.step("quotient", "periodic-quotient",
           "G/G0 = " + render(q) + (im.clause == "trivial" ? " is trivial" : " is a local product (clause 3)"));
    v.step("sufficiency", "sufficiency", render(n) + " is integrally approximable");
    return v;
}

/// Is g approximable by subgroups isomorphic to R?
inline Verdict classify_numeral(const GroupExpr &g) {
    auto n = normalize(g);
    Verdict v;
    auto [rank, c] = vector_split(n);
    if (rank != 1) {
        v.step("vector-rank", "vector-rank", "vectorRank=" + std::to_string(rank) + ", need exactly one R factor");
        return v;
    }
    auto f = structure_flags(c);
    if (!f.compact || !f.connected) {
        v.step("complement", "numeral-classification",
               "comp(G) = " + render(comp_part(c)) + " is not compact and connected");
        return v;
    }
    v.answer = true;
    v.step("complement", "numeral-classification", "G = R x " + render(c) + " with a compact connected complement");
    return v;
}

/// Compact-free and integrally approximable; cross-checked against the
/// explicit list R, Z, Q, QSub.
inline Verdict classify_compact_free(const GroupExpr &g) {
    auto n = normalize(g);
    auto integral = classify_integral(n);
    bool compact_free = structure_flags(n).compact_free;
    bool by_structure = compact_free && integral.answer;
    bool by_list = n.kind == Kind::R || detail::is_subgroup_of_q_atom(n);
    if (by_structure != by_list)
        throw InternalInconsistency("compact-free deciders disagree on " + render(n));
    Verdict v;
    v.answer = by_structure;
    if (!compact_free)
        v.step("compact-free", "compact-free", render(n) + " has a nonsingleton compact subgroup");
    else if (!integral.answer)
        v.step("compact-free", "compact-free", render(n) + " is compact-free but not integrally approximable");
    else
        v.step("compact-free", "compact-free", render(n) + " is R or a nonsingleton subgroup of Q");
    return v;
}

namespace detail {

inline CertificatePlan zn_leaf(std::uint64_t m) {
    CertificatePlan p;
    p.group = m == 1 ? "R" : "R x Z(" + std::to_string(m) + ")";
    p.leaf = LeafKind::ZnRecipe;
    p.modulus = m;
    p.note = "n -> <(1/n, 1 mod " + std::to_string(m) + ")>";
    return p;
}

inline CertificatePlan bohr_z_plan() {
    CertificatePlan pl;
    pl.group = "R x BohrZ";
    pl.operation = Closure::PL;
    pl.note = "strict projective limit of the quotients R x Z(m)";
    CertificatePlan ref;
    ref.group = "R x BohrZ";
    ref.leaf = LeafKind::KeyLemmaReference;
    ref.lemma = "first-key-lemma";
    pl.children.push_back(ref);
    std::uint64_t m = 1;
    for (std::uint64_t k = 1; k <= 5; ++k) {
        m *= k;
        pl.children.push_back(zn_leaf(m));
    }
    return pl;
}

inline CertificatePlan plan_r_times(const GroupExpr &h) {
    auto fs = factors_of(h);
    std::string name = h.is_trivial() ? "R" : "R x " + render(h);
    if (h.is_trivial())
        return zn_leaf(1);
    bool all_cyclic = true, all_torus = true;
    std::uint64_t m = 1;
    for (const auto &a : fs) {
        all_cyclic &= a.kind == Kind::Cyclic;
        all_torus &= a.kind == Kind::T;
        if (a.kind == Kind::Cyclic)
            m *= a.param;
    }
    if (all_cyclic)
        return zn_leaf(m);
    if (all_torus) {
        CertificatePlan p;
        p.group = name;
        p.leaf = LeafKind::RnRecipe;
        p.torus_rank = fs.size();
        p.note = "slope graphs r -> (r, n r, ..., n^t r) mod 1";
        return p;
    }
    if (!structure_flags(h).compact) {
        CertificatePlan du;
        du.group = name;
        du.operation = Closure::DU;
        du.note = "directed union of the open subgroups R x U_k with U_k compact";
        std::vector<GroupExpr> seen;
        for (unsigned k = 1; k <= 3; ++k) {
            std::vector<GroupExpr> piece;
            for (const auto &a : fs) {
                if (a.kind == Kind::Prufer)
                    piece.push_back(atoms::cyclic(ipow(a.param, k)));
                else if (a.kind == Kind::PadicRat)
                    piece.push_back(atoms::padic_int(a.param));
                else
                    piece.push_back(a);
            }
            auto u = normalize(atoms::prod(piece));
            if (std::find(seen.begin(), seen.end(), u) != seen.end())
                continue;
            seen.push_back(u);
            du.children.push_back(plan_r_times(u));
        }
        return du;
    }
    if (h.kind == Kind::BohrZ)
        return bohr_z_plan();
    CertificatePlan qg;
    qg.group = name;
    qg.operation = Closure::QG;
    qg.note = render(h) + " is monothetic, hence a quotient of BohrZ by a compact kernel";
    qg.children.push_back(bohr_z_plan());
    return qg;
}

} // namespace detail

/// Builds the chain of closure operations and concrete sequences that
/// certify approximability of g.
inline CertificatePlan witness_recipe(const GroupExpr &g) {
    auto n = normalize(g);
    if (!classify_integral(n).answer && !classify_numeral(n).answer)
        throw NotApproximable(render(n) + " is not approximable");
    if (structure_flags(n).discrete) {
        CertificatePlan p;
        p.group = render(n);
        p.leaf = LeafKind::DirectedUnionOfCyclics;
        if (n.kind == Kind::Q) {
            p.schedule.factorial = true;
            p.note = "H_n = (1/n!)Z";
        } else {
            p.schedule.heights = n.kind == Kind::QSub ? n.heights : HeightType{};
            p.note = "H_n = (1/d_n)Z, d_n = prod over the first n primes of p^min(n, height(p))";
        }
        return p;
    }
    return detail::plan_r_times(vector_split(n).second);
}

/// Verdict for the given mode with the witness plan attached when requested.
enum class Mode { Integral, Numeral, CompactFree };

inline Verdict classify(const GroupExpr &g, Mode mode, bool with_witness = false) {
    Verdict v;
    switch (mode) {
    case Mode::Integral: v = classify_integral(g); break;
    case Mode::Numeral: v = classify_numeral(g); break;
    case Mode::CompactFree: v = classify_compact_free(g); break;
    }
    if (with_witness && v.answer)
        v.witness_plan = witness_recipe(g);
    return v;
}

} // namespace chabauty
