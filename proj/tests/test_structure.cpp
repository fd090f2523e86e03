#include "chabauty/structure.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace chabauty;

TEST(IdentityComponent, Examples) {
    EXPECT_EQ(identity_component(parse("R x Z(4)")), atoms::R());
    EXPECT_EQ(identity_component(atoms::T()), atoms::T());
    EXPECT_TRUE(identity_component(atoms::padic_rat(7)).is_trivial());
    EXPECT_EQ(identity_component(atoms::bohr_z()), atoms::bohr_z0());
}

TEST(CompPart, Examples) {
    EXPECT_EQ(comp_part(atoms::padic_rat(5)), atoms::padic_rat(5));
    EXPECT_EQ(comp_part(parse("R x T")), atoms::T());
    EXPECT_TRUE(comp_part(atoms::Q()).is_trivial());
    EXPECT_EQ(comp_part(parse("Z x Prufer(2) x BohrR")), parse("Prufer(2) x BohrR"));
}

TEST(VectorSplit, Examples) {
    EXPECT_EQ(vector_split(parse("R x R x T")), std::make_pair(std::size_t{2}, atoms::T()));
    EXPECT_EQ(vector_split(atoms::Z()), std::make_pair(std::size_t{0}, atoms::Z()));
    EXPECT_EQ(vector_split(parse("R x Zp(2) x Z(3)")),
              std::make_pair(std::size_t{1}, atoms::prod({atoms::cyclic(3), atoms::padic_int(2)})));
}

TEST(Flags, Examples) {
    auto q = flags(atoms::Q());
    EXPECT_TRUE(q.flags.discrete);
    EXPECT_TRUE(q.flags.compact_free);
    EXPECT_FALSE(q.flags.periodic);

    auto rt = flags(parse("R x T"));
    EXPECT_TRUE(rt.flags.connected);
    EXPECT_EQ(rt.vector_rank, 1u);
    EXPECT_EQ(rt.comp_part, atoms::T());
    EXPECT_TRUE(rt.quotient_mod_g0.is_trivial());

    auto lp = flags(parse("LP[2:Zp(2), 3:Prufer(3)]"));
    EXPECT_TRUE(lp.flags.periodic);
    EXPECT_TRUE(lp.flags.totally_disconnected);
}

TEST(Flags, BohrZTable) {
    auto b = flags(atoms::bohr_z());
    EXPECT_TRUE(b.flags.compact);
    EXPECT_FALSE(b.flags.connected);
    EXPECT_EQ(b.quotient_mod_g0, atoms::zhat());
    EXPECT_EQ(b.identity_component, atoms::bohr_z0());
}

TEST(Monothetic, Examples) {
    EXPECT_TRUE(is_monothetic_compact(parse("T x Z(6)")));
    EXPECT_FALSE(is_monothetic_compact(parse("Z(2) x Z(2)")));
    EXPECT_TRUE(is_monothetic_compact(atoms::bohr_z()));
    EXPECT_TRUE(is_monothetic_compact(atoms::bohr_r()));
    EXPECT_TRUE(is_monothetic_compact(parse("T^3 x Zp(2) x Z(9)")));
    EXPECT_FALSE(is_monothetic_compact(parse("Zp(2) x Z(4)")));
    EXPECT_FALSE(is_monothetic_compact(parse("BohrZ x Z(5)")));
    EXPECT_THROW(is_monothetic_compact(atoms::R()), NotCompact);
    EXPECT_THROW(is_monothetic_compact(atoms::prufer(2)), NotCompact);
}

TEST(InductivelyMonothetic, Examples) {
    auto tt = is_inductively_monothetic(parse("T x T"));
    EXPECT_FALSE(tt.answer);
    EXPECT_FALSE(tt.trace.empty());

    auto q = is_inductively_monothetic(atoms::Q());
    EXPECT_TRUE(q.answer);
    EXPECT_EQ(q.clause, "2");

    auto lp = is_inductively_monothetic(parse("LP[2:Qp(2), 5:Z(25)]"));
    EXPECT_TRUE(lp.answer);
    EXPECT_EQ(lp.clause, "3");

    EXPECT_EQ(is_inductively_monothetic(parse("Sol{3:inf}")).clause, "1");
    EXPECT_EQ(is_inductively_monothetic(atoms::trivial()).clause, "trivial");
    EXPECT_TRUE(is_inductively_monothetic(atoms::zhat()).answer);

    auto two = is_inductively_monothetic(parse("Z(2) x Z(4)"));
    EXPECT_FALSE(two.answer);
    EXPECT_EQ(two.trace.back().detail, "two 2-primary components");
    EXPECT_FALSE(is_inductively_monothetic(parse("Zhat x Z(3)")).answer);
    EXPECT_FALSE(is_inductively_monothetic(parse("Z x Z")).answer);
}

TEST(StructureProperties, ReportInvariants) {
    testgen::ExprGenerator gen(11);
    for (int i = 0; i < 4000; ++i) {
        auto g = normalize(gen.expr(3));
        auto r = flags(g);
        ASSERT_EQ(comp_part(r.comp_part), r.comp_part) << render(g);
        ASSERT_TRUE(structure_flags(r.identity_component).connected) << render(g);
        ASSERT_EQ(r.flags.connected, r.identity_component == g) << render(g);
        if (r.flags.periodic) {
            ASSERT_TRUE(r.flags.totally_disconnected);
            ASSERT_EQ(r.comp_part, g);
            ASSERT_EQ(is_inductively_monothetic(g).answer, matches_local_product_clause(g)) << render(g);
        }
        if (r.flags.connected)
            ASSERT_TRUE(r.quotient_mod_g0.is_trivial());
        if (r.flags.compact) {
            ASSERT_EQ(r.comp_part, g);
            if (r.flags.totally_disconnected && is_monothetic_compact(g))
                ASSERT_TRUE(is_inductively_monothetic(g).answer) << render(g);
        }
    }
}
