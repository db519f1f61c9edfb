#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ctlz/generators.hpp"
#include "ctlz/modelcheck.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/satsearch.hpp"

using namespace ctlz;

namespace {

const ConcreteDomain kZ = ConcreteDomain::by_name("Z");

ConstraintKripke constraint_tree() {
    std::ifstream in(std::string(CTLZ_SAMPLES_DIR) + "/constraint_tree.model");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

void expect_model_satisfies(const std::optional<SatModel>& m, const Formula& f, const ConcreteDomain& dom) {
    ASSERT_TRUE(m.has_value()) << to_string(f);
    const auto nodes = check_ctlstar(m->model, f, dom);
    EXPECT_TRUE(std::binary_search(nodes.begin(), nodes.end(), m->node)) << to_string(f);
    EXPECT_NO_THROW(m->model.check_registers(dom));
}

}  // namespace

TEST(Candidates, IncludeConstantsAndResidues) {
    const auto c = register_candidates(parse_formula("E (eqc[3](x) & mod[1,4](y))"), 5, false);
    for (int v : {0, 1, -1, 5, -5, 3, 2, 4}) EXPECT_TRUE(std::count(c.begin(), c.end(), Rational(v))) << v;
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
    EXPECT_EQ(register_candidates(parse_formula("p"), 3, true).size(), 7u);
}

TEST(Candidates, TupleDomainsFilterMembers) {
    const auto allen = element_candidates(ConcreteDomain::by_name("allenZ"), {Rational(0), Rational(1)});
    EXPECT_EQ(allen, (std::vector<Element>{{Rational(0), Rational(1)}}));
    EXPECT_EQ(element_candidates(ConcreteDomain::by_name("lexZ[2]"), {Rational(0), Rational(1)}).size(), 4u);
}

TEST(FindModel, EventuallyConstant) {
    const Formula f = parse_formula("E F eqc[5](x)");
    const auto m = find_model(f, kZ, 1, 5);
    expect_model_satisfies(m, f, kZ);
    EXPECT_EQ(m->model.size(), 1);
    EXPECT_EQ(m->model.successors(0), std::vector<int>{0});
    EXPECT_EQ(m->model.reg(0, 0), Element{Rational(5)});
}

TEST(FindModel, IrreflexiveOrder) {
    for (int n = 1; n <= 3; ++n) EXPECT_FALSE(find_model(parse_formula("E lt(x, x)"), kZ, n, 3));
}

TEST(FindModel, ParityContradiction) {
    EXPECT_FALSE(find_model(parse_formula("E X mod[1,2](x) & A X mod[0,2](x)"), kZ, 3, 3));
}

TEST(FindModel, NeedsTwoNodes) {
    const Formula f = parse_formula("E X p & E X ~p");
    EXPECT_FALSE(find_model(f, kZ, 1, 1));
    expect_model_satisfies(find_model(f, kZ, 2, 1), f, kZ);
}

TEST(FindModel, OtherDomains) {
    const Formula up = parse_formula("A G lt(x, X^1 x)");
    EXPECT_FALSE(find_model(up, ConcreteDomain::by_name("N"), 3, 3));
    const Formula between = parse_formula("E (eqc[0](x) & lt(x, X^1 x) & X (lt(x, X^1 x) & X eqc[1](x)))");
    EXPECT_FALSE(find_model(between, kZ, 3, 3));
    expect_model_satisfies(find_model(between, ConcreteDomain::by_name("Q"), 3, 3), between, ConcreteDomain::by_name("Q"));
    const Formula lex = parse_formula("E X ltlex(x, X^1 x)");
    expect_model_satisfies(find_model(lex, ConcreteDomain::by_name("lexZ[2]"), 2, 1), lex, ConcreteDomain::by_name("lexZ[2]"));
}

TEST(FindModel, Limits) {
    EXPECT_THROW(find_model(parse_formula("p"), kZ, 5, 1), LimitError);
    EXPECT_THROW(find_model(parse_formula("p"), kZ, 0, 1), std::invalid_argument);
}

TEST(FindModel, FoundModelsAreVerified) {
    gen::Rng rng(31);
    gen::FormulaShape shape;
    shape.max_depth = 2;
    int found = 0;
    for (int i = 0; i < 40; ++i) {
        const Formula f = gen::random_ctl_formula(rng, shape);
        const auto m = find_model(f, kZ, 2, 2);
        if (!m) continue;
        ++found;
        expect_model_satisfies(m, f, kZ);
    }
    EXPECT_GT(found, 10);
}

TEST(Reduction, ConstraintTreeBothDirections) {
    const Formula f = parse_formula("E X (lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2))");
    const auto r = reduction_consistency(constraint_tree(), f, ConcreteDomain::by_name("N"), 8, 1);
    EXPECT_TRUE(r.premise);
    EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
    EXPECT_GT(r.backward_cases, 0);
}

TEST(Reduction, ConstraintFree) {
    const auto r = reduction_consistency(constraint_tree(), parse_formula("E X ~p | A X q"), kZ, 4, 2);
    EXPECT_TRUE(r.ok());
}

TEST(Reduction, RandomTrees) {
    gen::Rng rng(37);
    int premises = 0;
    for (int i = 0; i < 120; ++i) {
        const auto t = gen::random_tree(rng, 2, 2, {"x", "y"}, 3);
        const Formula f = gen::random_x_formula(rng, {"x", "y"}, {}, 2);
        const auto r = reduction_consistency(t, f, kZ, 4, static_cast<std::uint64_t>(i));
        EXPECT_TRUE(r.ok()) << to_string(f) << "\n" << (r.violations.empty() ? "" : r.violations.front());
        premises += r.premise;
    }
    EXPECT_GT(premises, 0);
}

TEST(Reduction, RejectsUnsupportedFormulas) {
    const auto t = constraint_tree();
    EXPECT_THROW(reduction_consistency(t, parse_formula("E (p U q)"), kZ), DomainError);
    EXPECT_THROW(reduction_consistency(t, parse_formula("E X E X p"), kZ), DomainError);
    EXPECT_THROW(reduction_consistency(t, parse_formula("E X X X lt(x1, X^1 x2)"), kZ), ModelError);
}

TEST(Candidates, MidpointsForDenseDomains) {
    EXPECT_EQ(with_midpoints({Rational(0), Rational(1), Rational(3)}),
              (std::vector<Rational>{Rational(0), Rational(1, 2), Rational(1), Rational(2), Rational(3)}));
}
