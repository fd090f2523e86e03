#pragma once

#include "chabauty/grammar.hpp"
#include "chabauty/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chabauty {

/// Fixed registry of the results a trace step may cite.
inline const std::map<std::string, std::string> &citation_registry() {
    static const std::map<std::string, std::string> registry{
        {"nonsingleton", "an approximable group is not a singleton"},
        {"discrete-case",
         "a group with compact identity component is integrally approximable iff it is discrete and "
         "isomorphic to a nonsingleton subgroup of Q"},
        {"compact-identity-component", "an integrally approximable group with compact identity component is discrete"},
        {"vector-rank", "R^n is integrally (or numerally) approximable iff n = 1"},
        {"r-times-comp", "a nondiscrete integrally approximable group is R x comp(G)"},
        {"periodic-quotient", "G/G0 of an integrally approximable group is periodic inductively monothetic"},
        {"sufficiency", "R x H with H = comp(H) and H/H0 inductively monothetic is integrally approximable"},
        {"first-key-lemma", "R x BohrZ is the limit of the cyclic subgroups generated by (1/n, 1)"},
        {"second-key-lemma", "R x BohrR is the limit of the graphs of n.f"},
        {"numeral-classification", "G is numerally approximable iff G = R x C with C compact connected"},
        {"compact-free", "compact-free integrally approximable groups are R and the nonsingleton subgroups of Q"},
        {"inductively-monothetic-classification",
         "inductively monothetic groups: one-dimensional compact connected, subgroups of Q, or local products "
         "of Z(p^n), Zp, Qp"},
        {"monothetic-prank", "a compact group is monothetic iff its dual embeds in T: every p-rank is at most 1"},
        {"closure-operations", "integral approximability passes to OS, QG, QO, DU and PL constructions"},
    };
    return registry;
}

struct TraceStep {
    std::string step;
    std::string cite;
    std::string detail;
};

/// Denominators d_n of a directed union of cyclic groups (1/d_n)Z.
struct DenominatorSchedule {
    bool factorial = false;
    HeightType heights;

    /// d_n for n >= 1.
    Integer at(unsigned n) const {
        Integer d = 1;
        if (factorial) {
            for (unsigned k = 2; k <= n; ++k)
                d *= k;
            return d;
        }
        for (auto p : first_primes(n)) {
            Height h = heights.at(p);
            unsigned e = h.infinite ? n : std::min<unsigned>(n, h.value);
            for (unsigned k = 0; k < e; ++k)
                d *= p;
        }
        return d;
    }
};

enum class Closure { OS, QG, QO, DU, PL };

inline const char *to_string(Closure c) {
    switch (c) {
    case Closure::OS: return "OS";
    case Closure::QG: return "QG";
    case Closure::QO: return "QO";
    case Closure::DU: return "DU";
    case Closure::PL: return "PL";
    }
    return "?";
}

enum class LeafKind { DirectedUnionOfCyclics, ZnRecipe, RnRecipe, KeyLemmaReference };

inline const char *to_string(LeafKind k) {
    switch (k) {
    case LeafKind::DirectedUnionOfCyclics: return "DirectedUnionOfCyclics";
    case LeafKind::ZnRecipe: return "ZnRecipe";
    case LeafKind::RnRecipe: return "RnRecipe";
    case LeafKind::KeyLemmaReference: return "KeyLemmaReference";
    }
    return "?";
}

/// Tree of closure operations ending in concrete approximating sequences.
struct CertificatePlan {
    // Group this node certifies, rendered.
    std::string group;
    std::optional<Closure> operation; // set on internal nodes
    std::optional<LeafKind> leaf;     // set on leaves
    std::uint64_t modulus = 1;        // ZnRecipe: n -> <(1/n, 1 mod m)> in R x Z(m)
    std::size_t torus_rank = 0;       // RnRecipe: slope graphs in R x T^t
    DenominatorSchedule schedule;     // DirectedUnionOfCyclics
    std::string lemma;                // KeyLemmaReference
    std::string note;
    std::vector<CertificatePlan> children;

    bool is_leaf() const { return leaf.has_value(); }
};

struct Verdict {
    bool answer = false;
    std::vector<TraceStep> trace;
    std::optional<CertificatePlan> witness_plan;
    // Which classification clause matched, when the decider reports one.
    std::string clause;

    Verdict &step(std::string name, std::string cite, std::string detail) {
        trace.push_back({std::move(name), std::move(cite), std::move(detail)});
        return *this;
    }
};

} // namespace chabauty
