#include <gtest/gtest.h>

#include "ctlz/generators.hpp"
#include "ctlz/modelcheck.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"

using namespace ctlz;

namespace {

const ConcreteDomain kZ = ConcreteDomain::by_name("Z");

ConstraintKripke self_loop(std::int64_t x) {
    ConstraintKripke c({"x"});
    c.add_node("v");
    c.add_edge(0, 0);
    c.set_register(0, "x", {Rational(x)});
    return c;
}

// a -> b -> a with x(a) = 0, x(b) = 1 and p at b.
ConstraintKripke two_cycle() {
    ConstraintKripke c({"x"});
    c.add_node("a");
    c.add_node("b");
    c.add_edge(0, 1);
    c.add_edge(1, 0);
    c.set_register(0, "x", {Rational(0)});
    c.set_register(1, "x", {Rational(1)});
    c.add_label(1, "p");
    return c;
}

std::vector<int> mc(const ConstraintKripke& c, const std::string& f) { return check_ctlstar(c, parse_formula(f), kZ); }

}  // namespace

TEST(Windows, SelfLoop) {
    const auto w = expand_windows(self_loop(0), 1);
    ASSERT_EQ(w.size(), 1);
    EXPECT_EQ(w.windows[0], (std::vector<int>{0, 0}));
    EXPECT_EQ(w.succ[0], std::vector<int>{0});
}

TEST(Windows, TwoCycle) {
    const auto w = expand_windows(two_cycle(), 1);
    ASSERT_EQ(w.size(), 2);
    EXPECT_EQ(w.windows[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(w.windows[1], (std::vector<int>{1, 0}));
    EXPECT_EQ(w.succ[0], std::vector<int>{1});
    EXPECT_EQ(w.succ[1], std::vector<int>{0});
}

TEST(Windows, DepthZeroIsTheModel) {
    const auto c = two_cycle();
    const auto w = expand_windows(c, 0);
    ASSERT_EQ(w.size(), c.size());
    for (int v = 0; v < c.size(); ++v) {
        EXPECT_EQ(w.windows[v], std::vector<int>{v});
        EXPECT_EQ(w.succ[v], c.successors(v));
    }
}

TEST(Windows, RejectsTreesAndHugeExpansions) {
    EXPECT_THROW(expand_windows(ConstraintKripke::tree(2, 1, {"x"}), 1), ModelError);
    ConstraintKripke k({"x"});
    for (int v = 0; v < 12; ++v) k.add_node("v" + std::to_string(v));
    for (int u = 0; u < 12; ++u)
        for (int v = 0; v < 12; ++v) k.add_edge(u, v);
    for (int v = 0; v < 12; ++v) k.set_register(v, "x", {Rational(0)});
    EXPECT_THROW(expand_windows(k, 5), LimitError);
}

TEST(CheckCtlStar, ConstantAlongLoop) {
    EXPECT_EQ(mc(self_loop(3), "E G eqc[3](x)"), std::vector<int>{0});
    EXPECT_TRUE(mc(self_loop(4), "E G eqc[3](x)").empty());
}

TEST(CheckCtlStar, UntilOnTwoCycle) { EXPECT_EQ(mc(two_cycle(), "E (lt(x, X^1 x) U eqc[1](x))"), (std::vector<int>{0, 1})); }

TEST(CheckCtlStar, Tautology) { EXPECT_EQ(mc(two_cycle(), "p | ~p"), (std::vector<int>{0, 1})); }

TEST(CheckCtlStar, PathFormulasBeyondCtl) {
    const auto c = two_cycle();
    EXPECT_EQ(mc(c, "A G F p"), (std::vector<int>{0, 1}));
    EXPECT_EQ(mc(c, "E (X p & X X ~p)"), std::vector<int>{0});
    EXPECT_EQ(mc(c, "A G (lt(x, X^1 x) | lt(X^1 x, x))"), (std::vector<int>{0, 1}));
    EXPECT_TRUE(mc(c, "E F G p").empty());
    EXPECT_EQ(mc(c, "E X X eq(x, X^2 x)"), (std::vector<int>{0, 1}));
}

TEST(CheckCtlStar, NonSnnfInputIsNormalized) {
    EXPECT_EQ(mc(two_cycle(), "~E X ~p"), std::vector<int>{0});
    EXPECT_EQ(mc(two_cycle(), "E ~eqc[0](x)"), std::vector<int>{1});
}

TEST(CheckCtlStar, RegistersMustBelongToDomain) {
    auto c = self_loop(-1);
    EXPECT_THROW(check_ctlstar(c, parse_formula("E G lt(x, X^1 x)"), ConcreteDomain::by_name("N")), Error);
}

TEST(Oracle, Examples) {
    const auto c = two_cycle();
    EXPECT_EQ(check_ctl_oracle(c, parse_formula("E X p"), kZ), std::vector<int>{0});
    EXPECT_TRUE(check_ctl_oracle(c, parse_formula("E G false"), kZ).empty());
    EXPECT_TRUE(mc(c, "E G false").empty());
}

TEST(Oracle, RejectsNestedPathOperators) {
    EXPECT_THROW(check_ctl_oracle(two_cycle(), parse_formula("E X X p"), kZ), DomainError);
}

TEST(Oracle, AgreesWithCtlStarOnRandomInputs) {
    gen::Rng rng(23);
    gen::FormulaShape shape;
    shape.max_depth = 3;
    for (int i = 0; i < 150; ++i) {
        const auto c = gen::random_graph(rng, 4, shape.vars, shape.props, 2);
        const Formula f = gen::random_ctl_formula(rng, shape);
        EXPECT_EQ(check_ctlstar(c, f, kZ), check_ctl_oracle(c, f, kZ)) << to_string(f) << "\n" << format_model(c);
    }
}

TEST(CheckCtlStar, DualityOnRandomInputs) {
    gen::Rng rng(29);
    gen::FormulaShape shape;
    shape.max_depth = 3;
    for (int i = 0; i < 100; ++i) {
        const auto c = gen::random_graph(rng, 4, shape.vars, shape.props, 2);
        const Formula path = gen::random_path_formula(rng, shape);
        const auto e = check_ctlstar(c, Formula::exists(path), kZ);
        const auto a = check_ctlstar(c, Formula::neg(Formula::all(Formula::neg(path))), kZ);
        EXPECT_EQ(e, a) << to_string(path);
    }
}

TEST(CheckCtlStar, SharedCacheGivesSameAnswers) {
    ModelCheckCache cache;
    const auto c = two_cycle();
    for (int i = 0; i < 2; ++i) {
        EXPECT_EQ(check_ctlstar(c, parse_formula("A G F p"), kZ, &cache), (std::vector<int>{0, 1}));
        EXPECT_EQ(check_ctlstar(c, parse_formula("E X p"), kZ, &cache), std::vector<int>{0});
    }
    EXPECT_FALSE(cache.automata.empty());
}
