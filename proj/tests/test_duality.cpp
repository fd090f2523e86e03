#include "chabauty/duality.hpp"
#include "chabauty/structure.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace chabauty;

TEST(Dual, AtomTable) {
    EXPECT_EQ(dual(atoms::T()), atoms::Z());
    EXPECT_EQ(dual(atoms::Z()), atoms::T());
    EXPECT_EQ(dual(atoms::prufer(3)), atoms::padic_int(3));
    EXPECT_EQ(dual(atoms::padic_int(3)), atoms::prufer(3));
    EXPECT_EQ(dual(atoms::cyclic(12)), atoms::cyclic(12));
    EXPECT_EQ(dual(atoms::Q()), atoms::solenoid(HeightType{{}, Height::inf()}));
    EXPECT_EQ(render(dual(parse("QSub{2:inf}"))), "Sol{2:inf; default 0}");
}

TEST(Dual, SelfDualProduct) {
    auto g = atoms::prod({atoms::R(), atoms::padic_rat(5)});
    EXPECT_EQ(dual(g), g);
}

TEST(Dual, LocalProductKeepsPrimes) {
    EXPECT_EQ(dual(parse("LP[2:Zp(2), 3:Prufer(3), 5:Qp(5)]")), parse("LP[2:Prufer(2), 3:Zp(3), 5:Qp(5)]"));
}

TEST(Dual, BohrAtomsAreUnrepresentable) {
    EXPECT_FALSE(dual_defined(atoms::bohr_z()));
    EXPECT_TRUE(dual_defined(atoms::Q()));
    EXPECT_FALSE(dual_defined(atoms::prod({atoms::bohr_r(), atoms::T()})));
    EXPECT_THROW(dual(atoms::bohr_z()), DualUnrepresentable);
    EXPECT_THROW(dual(parse("T x BohrR")), DualUnrepresentable);
}

TEST(Dual, PropertyInvolution) {
    testgen::ExprGenerator gen(99);
    int checked = 0;
    for (int i = 0; i < 4000; ++i) {
        auto g = gen.expr(3);
        if (!dual_defined(g)) {
            EXPECT_THROW(dual(g), DualUnrepresentable);
            continue;
        }
        ++checked;
        ASSERT_EQ(normalize(dual(dual(g))), normalize(g)) << render(g);
    }
    EXPECT_GT(checked, 1000);
}

TEST(Dual, PropertyCompactIffDualDiscrete) {
    testgen::ExprGenerator gen(5);
    for (int i = 0; i < 4000; ++i) {
        auto g = gen.expr(2, false);
        auto f = structure_flags(g);
        auto fd = structure_flags(dual(g));
        ASSERT_EQ(f.compact, fd.discrete) << render(g);
        ASSERT_EQ(f.discrete, fd.compact) << render(g);
        // connected groups have torsion-free duals
        if (f.connected) {
            for (const auto &a : factors_of(normalize(dual(g))))
                ASSERT_TRUE(a.kind == Kind::R || a.kind == Kind::Z || a.kind == Kind::Q || a.kind == Kind::QSub)
                    << render(g);
        }
    }
}
