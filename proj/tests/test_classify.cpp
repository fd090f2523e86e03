#include "chabauty/classify.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace chabauty;

namespace {

bool integral(const char *s) { return classify_integral(parse(s)).answer; }
bool numeral(const char *s) { return classify_numeral(parse(s)).answer; }

void expect_registered(const Verdict &v) {
    ASSERT_FALSE(v.trace.empty());
    for (const auto &s : v.trace)
        EXPECT_TRUE(citation_registry().count(s.cite)) << s.cite;
}

} // namespace

TEST(ClassifyIntegral, Examples) {
    EXPECT_TRUE(integral("R"));
    EXPECT_FALSE(integral("R^2"));
    EXPECT_FALSE(integral("R x Z(2) x Z(2)"));
    EXPECT_TRUE(integral("R x Qp(3)"));
    EXPECT_FALSE(integral("Z x Z(2)"));
    EXPECT_TRUE(integral("R x BohrZ"));
}

TEST(ClassifyIntegral, DiscreteBranch) {
    EXPECT_TRUE(integral("Z"));
    EXPECT_TRUE(integral("Q"));
    EXPECT_TRUE(integral("QSub{2:inf}"));
    EXPECT_FALSE(integral("Z x Z"));
    EXPECT_FALSE(integral("Z(5)"));
    EXPECT_FALSE(integral("Prufer(2)"));
    EXPECT_FALSE(integral("0"));
}

TEST(ClassifyIntegral, NondiscreteBranch) {
    EXPECT_TRUE(integral("R x Z(6)"));
    EXPECT_TRUE(integral("R x Prufer(2) x Zp(3) x Z(25)"));
    EXPECT_TRUE(integral("R x T^2 x Sol{default inf} x Qp(2)"));
    EXPECT_FALSE(integral("R x Z"));
    EXPECT_FALSE(integral("R x Q"));
    EXPECT_FALSE(integral("R x BohrZ x Z(2)"));
    EXPECT_FALSE(integral("T"));
    EXPECT_FALSE(integral("Zp(2)"));
    EXPECT_FALSE(integral("R x Zp(2) x Z(2)"));
}

TEST(ClassifyIntegral, TraceCitesRegisteredResults) {
    auto v = classify_integral(parse("R^2"));
    expect_registered(v);
    EXPECT_EQ(v.trace.front().cite, "vector-rank");
    EXPECT_NE(v.trace.front().detail.find("vectorRank=2"), std::string::npos);
    auto w = classify_integral(parse("R x Qp(3)"));
    expect_registered(w);
    EXPECT_EQ(w.trace.back().cite, "sufficiency");
}

TEST(ClassifyNumeral, Examples) {
    EXPECT_TRUE(numeral("R x T"));
    EXPECT_FALSE(numeral("R x Z(2)"));
    EXPECT_TRUE(numeral("R x BohrR"));
    EXPECT_TRUE(numeral("R x Sol{default inf}"));
    EXPECT_TRUE(numeral("R"));
    EXPECT_FALSE(numeral("R x BohrZ"));
    EXPECT_FALSE(numeral("T"));
    EXPECT_FALSE(numeral("R^2"));
    expect_registered(classify_numeral(parse("R x Z(2)")));
}

TEST(ClassifyCompactFree, Examples) {
    EXPECT_TRUE(classify_compact_free(atoms::R()).answer);
    EXPECT_FALSE(classify_compact_free(parse("R x T")).answer);
    EXPECT_TRUE(classify_compact_free(parse("QSub{2:inf; default 0}")).answer);
    EXPECT_FALSE(classify_compact_free(parse("Z^2")).answer);
}

TEST(ClassifyProperties, NumeralImpliesIntegralOnSmallCorpus) {
    auto corpus = testgen::small_corpus(3);
    EXPECT_EQ(corpus.size(), 13u + 91u + 455u);
    for (const auto &g : corpus) {
        if (classify_numeral(g).answer)
            ASSERT_TRUE(classify_integral(g).answer) << render(g);
        ASSERT_NO_THROW(classify_compact_free(g)) << render(g);
    }
}

TEST(ClassifyProperties, RandomInvariants) {
    testgen::ExprGenerator gen(2026);
    for (int i = 0; i < 10000; ++i) {
        auto g = gen.expr(3);
        auto iv = classify_integral(g);
        expect_registered(iv);
        if (classify_numeral(g).answer)
            ASSERT_TRUE(iv.answer) << render(g);
        if (iv.answer) {
            ASSERT_FALSE(normalize(g).is_trivial());
            ASSERT_NO_THROW(witness_recipe(g)) << render(g);
        } else if (!classify_numeral(g).answer) {
            ASSERT_THROW(witness_recipe(g), NotApproximable);
        }
        ASSERT_NO_THROW(classify_compact_free(g)) << render(g);
    }
}

TEST(ClassifyProperties, OpenSubgroupClosure) {
    // R x h approximable and u a compact open subgroup of h => R x u approximable.
    for (std::uint64_t p : {2u, 3u, 5u, 7u}) {
        std::pair<GroupExpr, GroupExpr> pairs[] = {
            {atoms::padic_rat(p), atoms::padic_int(p)},
            {atoms::padic_int(p), atoms::padic_int(p)},
        };
        for (const auto &[h, u] : pairs) {
            ASSERT_TRUE(classify_integral(atoms::prod({atoms::R(), h})).answer);
            EXPECT_TRUE(classify_integral(atoms::prod({atoms::R(), u})).answer);
        }
    }
}

TEST(WitnessRecipe, RationalsUseFactorialDenominators) {
    auto plan = witness_recipe(atoms::Q());
    ASSERT_EQ(plan.leaf, LeafKind::DirectedUnionOfCyclics);
    Integer f = 1;
    for (unsigned n = 1; n <= 10; ++n) {
        f *= n;
        EXPECT_EQ(plan.schedule.at(n), f);
    }
}

TEST(WitnessRecipe, QSubScheduleRespectsHeights) {
    auto plan = witness_recipe(parse("QSub{2:inf, 3:1; default 0}"));
    ASSERT_EQ(plan.leaf, LeafKind::DirectedUnionOfCyclics);
    EXPECT_EQ(plan.schedule.at(1), 2);
    EXPECT_EQ(plan.schedule.at(2), 4 * 3);
    EXPECT_EQ(plan.schedule.at(5), 32 * 3);
    auto z = witness_recipe(atoms::Z());
    EXPECT_EQ(z.schedule.at(7), 1);
}

TEST(WitnessRecipe, FiniteCyclicGivesZnRecipe) {
    auto plan = witness_recipe(parse("R x Z(3)"));
    ASSERT_EQ(plan.leaf, LeafKind::ZnRecipe);
    EXPECT_EQ(plan.modulus, 3u);
    EXPECT_EQ(witness_recipe(parse("R x Z(2) x Z(3)")).modulus, 6u);
    EXPECT_EQ(witness_recipe(atoms::R()).modulus, 1u);
}

TEST(WitnessRecipe, TorusGivesRnRecipe) {
    auto plan = witness_recipe(parse("R x T^2"));
    ASSERT_EQ(plan.leaf, LeafKind::RnRecipe);
    EXPECT_EQ(plan.torus_rank, 2u);
}

TEST(WitnessRecipe, BohrZIsProjectiveLimit) {
    auto plan = witness_recipe(parse("R x BohrZ"));
    ASSERT_EQ(plan.operation, Closure::PL);
    std::size_t zn = 0;
    for (const auto &c : plan.children)
        if (c.leaf == LeafKind::ZnRecipe)
            ++zn;
    EXPECT_GE(zn, 3u);
}

TEST(WitnessRecipe, NoncompactPiecesGoThroughDirectedUnion) {
    auto plan = witness_recipe(parse("R x Prufer(2)"));
    ASSERT_EQ(plan.operation, Closure::DU);
    ASSERT_EQ(plan.children.size(), 3u);
    EXPECT_EQ(plan.children[2].modulus, 8u);
    auto qp = witness_recipe(parse("R x Qp(3)"));
    ASSERT_EQ(qp.operation, Closure::DU);
    EXPECT_EQ(qp.children.front().operation, Closure::QG);
}

TEST(WitnessRecipe, RejectsNonApproximable) { EXPECT_THROW(witness_recipe(parse("R^2")), NotApproximable); }
