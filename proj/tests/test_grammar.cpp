#include "chabauty/grammar.hpp"
#include "chabauty/structure.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace chabauty;

namespace {

HeightType dyadic() {
    HeightType h;
    h.overrides[2] = Height::inf();
    return h;
}

} // namespace

TEST(Parse, ProductOfAtoms) {
    EXPECT_EQ(parse("R x Z(4)"), atoms::prod({atoms::R(), atoms::cyclic(4)}));
    EXPECT_EQ(parse("RxZ(4)"), parse("  R  x   Z ( 4 ) "));
}

TEST(Parse, ExponentExpands) {
    EXPECT_EQ(parse("R^2"), atoms::prod({atoms::R(), atoms::R()}));
    EXPECT_EQ(parse("R^2 x T"), atoms::prod({atoms::R(), atoms::R(), atoms::T()}));
    EXPECT_EQ(parse("T^1"), atoms::T());
}

TEST(Parse, HeightTypes) {
    EXPECT_EQ(parse("QSub{2:inf; default 0}"), atoms::qsub(dyadic()));
    EXPECT_EQ(parse("QSub{2:inf}"), atoms::qsub(dyadic()));
    HeightType h{{}, Height::inf()};
    EXPECT_EQ(parse("Sol{default inf}"), atoms::solenoid(h));
    // entries equal to the default are dropped at parse time
    EXPECT_EQ(parse("QSub{2:inf, 3:0; default 0}"), atoms::qsub(dyadic()));
}

TEST(Parse, AllAtoms) {
    auto g = parse("R x T x Z x Q x Z(6) x Prufer(3) x Zp(5) x Qp(7) x BohrZ x BohrR x LP[2:Zp(2), 3:Prufer(3)]");
    ASSERT_EQ(g.kind, Kind::Prod);
    EXPECT_EQ(g.factors.size(), 11u);
    EXPECT_EQ(g.factors.back(), atoms::local_prod({atoms::padic_int(2), atoms::prufer(3)}));
    EXPECT_EQ(parse("LP[5:Z(25)]"), atoms::local_prod({atoms::cyclic(25)}));
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
    try {
        parse("R x W");
        FAIL();
    } catch (const SyntaxError &e) {
        EXPECT_EQ(e.offset(), 4u);
    }
    EXPECT_THROW(parse(""), SyntaxError);
    EXPECT_THROW(parse("R x"), SyntaxError);
    EXPECT_THROW(parse("Z(1)"), SyntaxError);
    EXPECT_THROW(parse("R^0"), SyntaxError);
    EXPECT_THROW(parse("QSub{2:inf; default 3}"), SyntaxError);
    EXPECT_THROW(parse("LP[2:Zp(3)]"), SyntaxError);
    EXPECT_THROW(parse("LP[2:Z(6)]"), SyntaxError);
    EXPECT_THROW(parse("LP[2:Zp(2), 2:Prufer(2)]"), SyntaxError);
    EXPECT_THROW(parse("LP[2:T]"), SyntaxError);
}

TEST(Parse, CompositeInPrimeSlot) {
    EXPECT_THROW(parse("Zp(4)"), PrimeError);
    EXPECT_THROW(parse("Prufer(1)"), PrimeError);
    EXPECT_THROW(parse("QSub{6:1; default 0}"), PrimeError);
    try {
        parse("R x Qp(9)");
        FAIL();
    } catch (const PrimeError &e) {
        EXPECT_EQ(e.value(), 9u);
        EXPECT_EQ(e.offset(), 7u);
    }
}

TEST(Render, Examples) {
    EXPECT_EQ(render(atoms::prod({atoms::R(), atoms::cyclic(4)})), "R x Z(4)");
    EXPECT_EQ(render(atoms::Q()), "Q");
    EXPECT_EQ(render(atoms::solenoid(HeightType{{}, Height::inf()})), "Sol{default inf}");
    EXPECT_EQ(render(atoms::qsub(dyadic())), "QSub{2:inf; default 0}");
    EXPECT_EQ(render(atoms::trivial()), "0");
}

TEST(Normalize, SplitsCyclicByCrt) {
    EXPECT_EQ(normalize(atoms::prod({atoms::cyclic(6)})), atoms::prod({atoms::cyclic(2), atoms::cyclic(3)}));
    EXPECT_EQ(normalize(atoms::cyclic(12)), atoms::prod({atoms::cyclic(4), atoms::cyclic(3)}));
}

TEST(Normalize, FlattensAndSorts) {
    auto g = atoms::prod({atoms::R(), atoms::prod({atoms::T(), atoms::R()})});
    EXPECT_EQ(normalize(g), atoms::prod({atoms::R(), atoms::R(), atoms::T()}));
}

TEST(Normalize, CollapsesQSub) {
    EXPECT_EQ(normalize(atoms::qsub(HeightType{{}, Height::inf()})), atoms::Q());
    EXPECT_EQ(normalize(atoms::qsub(HeightType{})), atoms::Z());
    EXPECT_EQ(normalize(atoms::solenoid(HeightType{})), atoms::T());
}

TEST(Normalize, LocalProductOfFinitelyManyPrimesIsAProduct) {
    EXPECT_EQ(normalize(parse("LP[3:Prufer(3), 2:Zp(2)]")), normalize(parse("Zp(2) x Prufer(3)")));
}

TEST(Normalize, DropsTrivialFactors) {
    EXPECT_EQ(normalize(parse("0 x R x 0")), atoms::R());
    EXPECT_TRUE(normalize(parse("0 x 0")).is_trivial());
}

TEST(Normalize, PropertyIdempotentAndRoundTrips) {
    testgen::ExprGenerator gen(20241016);
    for (int i = 0; i < 3000; ++i) {
        auto g = gen.expr(3);
        auto n = normalize(g);
        ASSERT_EQ(normalize(n), n) << render(g);
        ASSERT_EQ(parse(render(n)), n) << render(n);
    }
}

TEST(Normalize, PropertyPreservesPrimePowerInvariants) {
    // The multiset of finite prime-power orders survives normalization,
    // measured through the dual torsion ranks the structure module uses.
    testgen::ExprGenerator gen(7);
    for (int i = 0; i < 2000; ++i) {
        auto g = gen.expr(2);
        std::map<std::uint64_t, std::uint64_t> before;
        auto collect = [&](auto &self, const GroupExpr &e) -> void {
            if (e.kind == Kind::Cyclic) {
                for (auto [p, k] : factorize(e.param))
                    before[ipow(p, k)]++;
            }
            for (const auto &f : e.factors)
                self(self, f);
        };
        collect(collect, g);
        std::map<std::uint64_t, std::uint64_t> after;
        for (const auto &f : factors_of(normalize(g)))
            if (f.kind == Kind::Cyclic)
                after[f.param]++;
        ASSERT_EQ(before, after) << render(g);
    }
}
