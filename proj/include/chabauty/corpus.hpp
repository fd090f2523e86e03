#pragma once

#include "chabauty/grammar.hpp"

#include <random>
#include <vector>

namespace chabauty::corpus {

/// Atom pool used by the exhaustive small-expression corpus.
inline std::vector<GroupExpr> atom_pool() {
    return {
        atoms::R(),          atoms::T(),           atoms::Z(),
        atoms::Q(),          atoms::cyclic(2),     atoms::cyclic(3),
        atoms::cyclic(4),    atoms::prufer(2),     atoms::padic_int(2),
        atoms::padic_rat(2), atoms::solenoid(HeightType{{}, Height::inf()}),
        atoms::bohr_z(),     atoms::bohr_r(),
    };
}

/// All normalized products of 1..maxFactors atoms from the pool (multisets).
inline std::vector<GroupExpr> small_corpus(std::size_t maxFactors = 3) {
    auto pool = atom_pool();
    std::vector<GroupExpr> out;
    std::vector<std::size_t> idx;
    auto rec = [&](auto &self, std::size_t start) -> void {
        if (!idx.empty()) {
            std::vector<GroupExpr> fs;
            for (auto i : idx)
                fs.push_back(pool[i]);
            out.push_back(normalize(atoms::prod(fs)));
        }
        if (idx.size() == maxFactors)
            return;
        for (std::size_t i = start; i < pool.size(); ++i) {
            idx.push_back(i);
            self(self, i);
            idx.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

class ExprGenerator {
public:
    explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

    HeightType heights() {
        HeightType h;
        h.fallback = coin() ? Height::inf() : Height::finite(0);
        std::size_t k = pick(3);
        static const std::uint64_t primes[] = {2, 3, 5, 7};
        for (std::size_t i = 0; i < k; ++i) {
            auto p = primes[pick(4)];
            h.overrides[p] = pick(3) == 0 ? Height::inf() : Height::finite(static_cast<std::uint32_t>(pick(4)));
        }
        return h;
    }

    std::uint64_t prime() {
        static const std::uint64_t primes[] = {2, 3, 5, 7, 11};
        return primes[pick(5)];
    }

    GroupExpr local_component(std::uint64_t p) {
        switch (pick(4)) {
        case 0: return atoms::cyclic(ipow(p, 1 + static_cast<unsigned>(pick(3))));
        case 1: return atoms::prufer(p);
        case 2: return atoms::padic_int(p);
        default: return atoms::padic_rat(p);
        }
    }

    GroupExpr atom(bool allowBohr = true) {
        switch (pick(allowBohr ? 14 : 12)) {
        case 0: return atoms::R();
        case 1: return atoms::T();
        case 2: return atoms::Z();
        case 3: return atoms::Q();
        case 4: return atoms::cyclic(2 + pick(30));
        case 5: return atoms::prufer(prime());
        case 6: return atoms::padic_int(prime());
        case 7: return atoms::padic_rat(prime());
        case 8: return atoms::qsub(heights());
        case 9: return atoms::solenoid(heights());
        case 10: {
            std::vector<GroupExpr> comps;
            std::vector<std::uint64_t> used;
            for (std::size_t i = 0, k = 1 + pick(3); i < k; ++i) {
                auto p = prime();
                if (std::find(used.begin(), used.end(), p) != used.end())
                    continue;
                used.push_back(p);
                comps.push_back(local_component(p));
            }
            return atoms::local_prod(comps);
        }
        case 11: return atoms::trivial();
        case 12: return atoms::bohr_z();
        default: return atoms::bohr_r();
        }
    }

    /// Random, possibly nested and unnormalized expression.
    GroupExpr expr(int depth = 2, bool allowBohr = true) {
        if (depth == 0 || pick(3) == 0)
            return atom(allowBohr);
        std::vector<GroupExpr> fs;
        for (std::size_t i = 0, k = 1 + pick(3); i < k; ++i)
            fs.push_back(expr(depth - 1, allowBohr));
        return atoms::prod(fs);
    }

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin() { return pick(2) == 1; }

private:
    std::mt19937_64 rng_;
};

} // namespace chabauty::corpus
