#pragma once

#include "chabauty/errors.hpp"
#include "chabauty/grammar.hpp"

namespace chabauty {

/// True iff every atom of g has a character group inside the grammar.
inline bool dual_defined(const GroupExpr &g) {
    switch (g.kind) {
    case Kind::BohrZ:
    case Kind::BohrR:
    case Kind::BohrZ0:
    case Kind::AllPrimesProfinite:
        return false;
    case Kind::Prod:
    case Kind::LocalProd:
        for (const auto &f : g.factors)
            if (!dual_defined(f))
                return false;
        return true;
    default:
        return true;
    }
}

/// Pontryagin dual, atom by atom. Products dualize componentwise; a local
/// product keeps its primes and the component types swap with their duals.
inline GroupExpr dual(const GroupExpr &g) {
    switch (g.kind) {
    case Kind::R: return atoms::R();
    case Kind::T: return atoms::Z();
    case Kind::Z: return atoms::T();
    case Kind::Q: return atoms::solenoid(HeightType{{}, Height::inf()});
    case Kind::Cyclic: return atoms::cyclic(g.param);
    case Kind::Prufer: return atoms::padic_int(g.param);
    case Kind::PadicInt: return atoms::prufer(g.param);
    case Kind::PadicRat: return atoms::padic_rat(g.param);
    case Kind::QSub: return atoms::solenoid(g.heights);
    case Kind::Solenoid: return atoms::qsub(g.heights);
    case Kind::BohrZ:
        throw DualUnrepresentable("the dual of BohrZ is the discrete circle, which the grammar cannot express");
    case Kind::BohrR:
        throw DualUnrepresentable("the dual of BohrR is the discrete reals, which the grammar cannot express");
    case Kind::BohrZ0:
        throw DualUnrepresentable("BohrZ0 is an opaque invariant without a dual");
    case Kind::AllPrimesProfinite:
        throw DualUnrepresentable("the dual of Zhat is Q/Z, which the grammar cannot express");
    case Kind::Prod:
    case Kind::LocalProd: {
        GroupExpr out{g.kind};
        out.factors.reserve(g.factors.size());
        for (const auto &f : g.factors)
            out.factors.push_back(dual(f));
        return out;
    }
    }
    throw DualUnrepresentable("unknown atom");
}

} // namespace chabauty
