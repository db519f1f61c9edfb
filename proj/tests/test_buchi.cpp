#include <gtest/gtest.h>

#include "ctlz/buchi.hpp"
#include "ctlz/generators.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"

using namespace ctlz;

namespace {

using Word = std::vector<std::set<std::string>>;

const std::vector<std::set<std::string>> kLetters = {{}, {"p"}, {"q"}, {"p", "q"}};

/// Every lasso u v^ω with |uv| ≤ max_len over {p, q}.
template <class Fn>
void for_each_lasso(int max_len, Fn fn) {
    for (int n = 1; n <= max_len; ++n) {
        int total = 1;
        for (int i = 0; i < n; ++i) total *= 4;
        for (int code = 0; code < total; ++code) {
            Word w;
            for (int i = 0, c = code; i < n; ++i, c /= 4) w.push_back(kLetters[c % 4]);
            for (int loop = 0; loop < n; ++loop) fn(w, loop);
        }
    }
}

void expect_matches_lasso_semantics(const Formula& f) {
    const Formula n = to_nnf(f);
    const auto aut = ltl_to_buchi(n);
    int total = 0;
    for_each_lasso(4, [&](const Word& w, int loop) {
        const bool expected = eval_ltl_lasso(n, w, loop)[0] != 0;
        ASSERT_EQ(buchi_accepts_lasso(aut, w, loop), expected) << to_string(f) << " loop " << loop;
        ++total;
    });
    EXPECT_EQ(total, 1252);
}

}  // namespace

TEST(LassoSemantics, DirectEvaluation) {
    const Word w = {{"p"}, {}, {"q"}};
    EXPECT_EQ(eval_ltl_lasso(parse_path_formula("X q"), w, 1), (std::vector<char>{0, 1, 0}));
    EXPECT_EQ(eval_ltl_lasso(parse_path_formula("F q"), w, 1), (std::vector<char>{1, 1, 1}));
    EXPECT_EQ(eval_ltl_lasso(parse_path_formula("G F p"), w, 1), (std::vector<char>{0, 0, 0}));
    EXPECT_EQ(eval_ltl_lasso(parse_path_formula("p U q"), w, 0), (std::vector<char>{0, 0, 1}));
}

TEST(Buchi, NextNeedsPositionOne) {
    const auto aut = ltl_to_buchi(parse_path_formula("X p"));
    EXPECT_TRUE(buchi_accepts_lasso(aut, {{}, {"p"}}, 0));
    EXPECT_FALSE(buchi_accepts_lasso(aut, {{"p"}, {}}, 0));
    expect_matches_lasso_semantics(parse_path_formula("X p"));
}

TEST(Buchi, GloballySingleState) {
    const auto aut = ltl_to_buchi(to_nnf(parse_path_formula("G p")));
    ASSERT_EQ(aut.size(), 1);
    EXPECT_EQ(aut.states[0].pos, std::set<std::string>{"p"});
    EXPECT_EQ(aut.states[0].next, std::vector<int>{0});
    expect_matches_lasso_semantics(parse_path_formula("G p"));
}

TEST(Buchi, UntilTwoStates) {
    const auto aut = ltl_to_buchi(parse_path_formula("p U q"));
    EXPECT_EQ(aut.acceptance.size(), 1u);
    expect_matches_lasso_semantics(parse_path_formula("p U q"));
}

TEST(Buchi, AssortedFormulas) {
    for (const char* s : {"G F p", "F G ~q", "p R q", "(p U q) U ~p", "X (p & ~X q)", "G (p | X q)", "~(p U (q R p))",
                          "true", "false", "F (p & X X q)"})
        expect_matches_lasso_semantics(parse_path_formula(s));
}

TEST(Buchi, RandomFormulas) {
    gen::Rng rng(17);
    gen::FormulaShape shape;
    shape.constraint_depth = -1;
    shape.max_depth = 3;
    for (int i = 0; i < 40; ++i) expect_matches_lasso_semantics(gen::random_path_formula(rng, shape, false));
}

TEST(Buchi, RejectsNonPropositionalInput) {
    EXPECT_THROW(ltl_to_buchi(parse_path_formula("E X p")), Error);
    EXPECT_THROW(ltl_to_buchi(parse_path_formula("lt(x, y)")), Error);
    EXPECT_THROW(ltl_to_buchi(parse_path_formula("~(p U q)")), Error);
}
