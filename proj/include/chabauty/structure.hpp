#pragma once

#include "chabauty/errors.hpp"
#include "chabauty/grammar.hpp"
#include "chabauty/verdict.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace chabauty {

struct StructureFlags {
    bool compact = true;
    bool discrete = true;
    bool connected = true;
    bool totally_disconnected = true;
    bool periodic = true;
    bool compact_free = true;
    bool torsion_free_discrete = true;

    friend bool operator==(const StructureFlags &, const StructureFlags &) = default;
};

struct StructureReport {
    std::size_t vector_rank = 0;
    GroupExpr identity_component;
    GroupExpr comp_part;
    GroupExpr quotient_mod_g0;
    StructureFlags flags;
};

namespace detail {

// Truth table for one normalized atom.
inline StructureFlags atom_flags(Kind k) {
    StructureFlags f;
    auto set = [&](bool compact, bool discrete, bool connected, bool td, bool periodic, bool cfree, bool tfd) {
        f = {compact, discrete, connected, td, periodic, cfree, tfd};
    };
    switch (k) {
    //                          compact discrete connected td  periodic cfree tfd
    case Kind::R:           set(false, false, true,  false, false, true,  false); break;
    case Kind::T:           set(true,  false, true,  false, false, false, false); break;
    case Kind::Z:           set(false, true,  false, true,  false, true,  true);  break;
    case Kind::Q:           set(false, true,  false, true,  false, true,  true);  break;
    case Kind::QSub:        set(false, true,  false, true,  false, true,  true);  break;
    case Kind::Cyclic:      set(true,  true,  false, true,  true,  false, false); break;
    case Kind::Prufer:      set(false, true,  false, true,  true,  false, false); break;
    case Kind::PadicInt:    set(true,  false, false, true,  true,  false, false); break;
    case Kind::PadicRat:    set(false, false, false, true,  true,  false, false); break;
    case Kind::Solenoid:    set(true,  false, true,  false, false, false, false); break;
    case Kind::BohrZ:       set(true,  false, false, false, false, false, false); break;
    case Kind::BohrR:       set(true,  false, true,  false, false, false, false); break;
    case Kind::BohrZ0:      set(true,  false, true,  false, false, false, false); break;
    case Kind::AllPrimesProfinite:
                            set(true,  false, false, true,  true,  false, false); break;
    case Kind::Prod:
    case Kind::LocalProd:   break;
    }
    return f;
}

inline GroupExpr atom_identity_component(const GroupExpr &a) {
    switch (a.kind) {
    case Kind::R:
    case Kind::T:
    case Kind::Solenoid:
    case Kind::BohrR:
    case Kind::BohrZ0:
        return a;
    case Kind::BohrZ:
        return atoms::bohr_z0();
    default:
        return atoms::trivial();
    }
}

inline GroupExpr atom_comp_part(const GroupExpr &a) {
    switch (a.kind) {
    case Kind::R:
    case Kind::Z:
    case Kind::Q:
    case Kind::QSub:
        return atoms::trivial();
    default:
        return a;
    }
}

inline GroupExpr atom_quotient_mod_g0(const GroupExpr &a) {
    switch (a.kind) {
    case Kind::R:
    case Kind::T:
    case Kind::Solenoid:
    case Kind::BohrR:
    case Kind::BohrZ0:
        return atoms::trivial();
    case Kind::BohrZ:
        return atoms::zhat();
    default:
        return a;
    }
}

template <class F>
GroupExpr map_factors(const GroupExpr &g, F &&f) {
    std::vector<GroupExpr> out;
    for (const auto &a : factors_of(normalize(g)))
        out.push_back(f(a));
    return normalize(atoms::prod(std::move(out)));
}

inline bool is_p_local(Kind k) {
    return k == Kind::Cyclic || k == Kind::Prufer || k == Kind::PadicInt || k == Kind::PadicRat ||
           k == Kind::AllPrimesProfinite;
}

} // namespace detail

/// G0, factor by factor. BohrZ contributes the opaque BohrZ0.
inline GroupExpr identity_component(const GroupExpr &g) {
    return detail::map_factors(g, detail::atom_identity_component);
}

/// comp(G): the union of all compact subgroups.
inline GroupExpr comp_part(const GroupExpr &g) { return detail::map_factors(g, detail::atom_comp_part); }

/// G/G0. For BohrZ this is Zhat, the profinite completion of Z.
inline GroupExpr quotient_mod_g0(const GroupExpr &g) {
    return detail::map_factors(g, detail::atom_quotient_mod_g0);
}

/// G = R^n x H with H having a compact open subgroup or being discrete.
inline std::pair<std::size_t, GroupExpr> vector_split(const GroupExpr &g) {
    std::size_t n = 0;
    std::vector<GroupExpr> rest;
    for (const auto &a : factors_of(normalize(g))) {
        if (a.kind == Kind::R)
            ++n;
        else if (!a.is_trivial())
            rest.push_back(a);
    }
    return {n, normalize(atoms::prod(std::move(rest)))};
}

inline StructureFlags structure_flags(const GroupExpr &g) {
    StructureFlags acc;
    for (const auto &a : factors_of(normalize(g))) {
        if (a.is_trivial())
            continue;
        auto f = detail::atom_flags(a.kind);
        acc.compact &= f.compact;
        acc.discrete &= f.discrete;
        acc.connected &= f.connected;
        acc.totally_disconnected &= f.totally_disconnected;
        acc.periodic &= f.periodic;
        acc.compact_free &= f.compact_free;
        acc.torsion_free_discrete &= f.torsion_free_discrete;
    }
    return acc;
}

inline StructureReport flags(const GroupExpr &g) {
    StructureReport r;
    auto n = normalize(g);
    r.vector_rank = vector_split(n).first;
    r.identity_component = identity_component(n);
    r.comp_part = comp_part(n);
    r.quotient_mod_g0 = quotient_mod_g0(n);
    r.flags = structure_flags(n);
    return r;
}

namespace detail {

// p-ranks of the torsion part of the dual of a compact group.
struct PRanks {
    std::size_t all_primes = 0; // contribution shared by every prime
    std::map<std::uint64_t, std::size_t> at;

    std::size_t max_rank() const {
        std::size_t m = all_primes;
        for (const auto &[p, r] : at)
            m = std::max(m, r + all_primes);
        return m;
    }
};

inline PRanks dual_torsion_ranks(const GroupExpr &g) {
    PRanks r;
    for (const auto &a : factors_of(normalize(g))) {
        switch (a.kind) {
        case Kind::Cyclic:
        case Kind::PadicInt:
            ++r.at[a.prime()];
            break;
        case Kind::BohrZ:
        case Kind::AllPrimesProfinite:
            ++r.all_primes;
            break;
        default:
            // T, Sol, BohrR, BohrZ0 have torsion-free duals.
            break;
        }
    }
    return r;
}

} // namespace detail

/// Compact g is monothetic iff its dual embeds into T, i.e. iff the dual's
/// torsion has p-rank at most 1 at every prime.
inline bool is_monothetic_compact(const GroupExpr &g) {
    auto n = normalize(g);
    if (!structure_flags(n).compact)
        throw NotCompact(render(n) + " is not compact");
    return detail::dual_torsion_ranks(n).max_rank() <= 1;
}

/// Decides inductive monotheticity by matching the three classification
/// clauses. The clause tag is one of "trivial", "1", "2", "3".
inline Verdict is_inductively_monothetic(const GroupExpr &g) {
    const std::string cite = "inductively-monothetic-classification";
    auto n = normalize(g);
    Verdict v;
    if (n.is_trivial()) {
        v.answer = true;
        v.clause = "trivial";
        v.step("trivial", cite, "the trivial group is inductively monothetic");
        return v;
    }
    auto fs = factors_of(n);
    if (fs.size() == 1) {
        const auto &a = fs.front();
        if (a.kind == Kind::T || a.kind == Kind::Solenoid) {
            v.answer = true;
            v.clause = "1";
            v.step("clause-1", cite, render(a) + " is one-dimensional compact connected");
            return v;
        }
        if (a.kind == Kind::Z || a.kind == Kind::Q || a.kind == Kind::QSub) {
            v.answer = true;
            v.clause = "2";
            v.step("clause-2", cite, render(a) + " is a discrete subgroup of Q");
            return v;
        }
    }
    std::map<std::uint64_t, std::string> seen;
    std::string all_primes;
    for (const auto &a : fs) {
        if (!detail::is_p_local(a.kind)) {
            v.answer = false;
            v.step("not-local", cite,
                   fs.size() == 1 ? render(a) + " matches no clause"
                                  : "factor " + render(a) + " is not p-primary, so " + render(n) + " matches no clause");
            return v;
        }
        if (a.kind == Kind::AllPrimesProfinite) {
            if (!all_primes.empty() || !seen.empty()) {
                v.answer = false;
                v.step("repeated-prime", cite, "Zhat shares every prime with another component");
                return v;
            }
            all_primes = render(a);
            continue;
        }
        auto p = a.prime();
        if (!all_primes.empty() || seen.count(p)) {
            v.answer = false;
            v.step("repeated-prime", cite, "two " + std::to_string(p) + "-primary components");
            return v;
        }
        seen[p] = render(a);
    }
    v.answer = true;
    v.clause = "3";
    v.step("clause-3", cite, "local product with at most one component per prime");
    return v;
}

/// Direct pattern matcher for the local-product clause: every factor is
/// p-local and no two factors share a prime. Used to cross-check the
/// decider on periodic groups.
inline bool matches_local_product_clause(const GroupExpr &g) {
    auto fs = factors_of(normalize(g));
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (fs[i].is_trivial())
            continue;
        if (!detail::is_p_local(fs[i].kind))
            return false;
        for (std::size_t j = 0; j < i; ++j) {
            bool overlap = fs[i].kind == Kind::AllPrimesProfinite || fs[j].kind == Kind::AllPrimesProfinite ||
                           fs[i].prime() == fs[j].prime();
            if (overlap)
                return false;
        }
    }
    return true;
}

} // namespace chabauty
