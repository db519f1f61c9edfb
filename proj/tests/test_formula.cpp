#include <gtest/gtest.h>

#include "ctlz/domain.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"

using namespace ctlz;

namespace {

Formula P(const std::string& s) { return parse_path_formula(s, true); }

std::string snnf_z(const std::string& s) { return to_string(to_snnf(P(s), ConcreteDomain::by_name("Z"))); }

}  // namespace

TEST(Parser, UntilWithConstantConstraint) {
    const Formula f = parse_formula("E (lt(x, X^1 y) U eqc[100](y))");
    ASSERT_EQ(f.op(), Op::Exists);
    const Formula u = f.lhs();
    ASSERT_EQ(u.op(), Op::Until);
    ASSERT_EQ(u.lhs().op(), Op::Atom);
    const Constraint& lt = u.lhs().constraint();
    EXPECT_EQ(lt.rel, RelationSymbol::less());
    EXPECT_EQ(lt.args, (std::vector<Term>{{0, "x"}, {1, "y"}}));
    const Constraint& c = u.rhs().constraint();
    EXPECT_EQ(c.rel, RelationSymbol::constant_eq(Rational(100)));
    EXPECT_EQ(c.args, (std::vector<Term>{{0, "y"}}));
}

TEST(Parser, Proposition) {
    const Formula f = parse_formula("p");
    EXPECT_EQ(f.op(), Op::Prop);
    EXPECT_EQ(f.prop_name(), "p");
}

TEST(Parser, AllNextModulo) {
    const Formula f = parse_formula("A X mod[1,2](x)");
    ASSERT_EQ(f.op(), Op::All);
    ASSERT_EQ(f.lhs().op(), Op::Next);
    EXPECT_EQ(f.lhs().lhs().constraint().rel, RelationSymbol::modulo(1, 2));
}

TEST(Parser, RoundTripThroughPrinter) {
    for (const char* s : {"E (p U X q) & A G lt(x, X^2 y)", "~(p | E X ~q)", "A (p R (q & eq(x, y)))",
                          "E F (mod[0,3](X^1 x) | eqc[-2](x))", "E (X X p & ~X q)"}) {
        const Formula f = parse_path_formula(s);
        EXPECT_EQ(parse_path_formula(to_string(f)), f) << s;
    }
}

TEST(Parser, RejectsPathFormulaAsState) {
    EXPECT_THROW(parse_formula("X p"), ParseError);
    EXPECT_THROW(parse_formula("p U q"), ParseError);
    EXPECT_NO_THROW(parse_path_formula("p U q"));
}

TEST(Parser, ReportsPosition) {
    try {
        parse_formula("E (p");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 5);
    }
}

TEST(Parser, ReservedIdentifiers) {
    EXPECT_THROW(parse_formula("__p0"), ParseError);
    EXPECT_NO_THROW(parse_formula("__p0", true));
}

TEST(Nnf, DeMorganAndDuality) {
    EXPECT_EQ(to_nnf(P("~(p & E X q)")), P("~p | A X ~q"));
}

TEST(Nnf, UntilBecomesRelease) {
    EXPECT_EQ(to_nnf(P("~(p U (q & ~r))")), P("~p R (~q | r)"));
}

TEST(Nnf, FixpointOnNnfInput) {
    const Formula f = P("~p | A (q R E X ~r)");
    EXPECT_EQ(to_nnf(f), f);
    EXPECT_EQ(to_nnf(to_nnf(P("~A (p U ~E X q)"))), to_nnf(P("~A (p U ~E X q)")));
}

TEST(Snnf, NegatedEquality) { EXPECT_EQ(snnf_z("~eq(x, X^1 y)"), "lt(x, X^1 y) | lt(X^1 y, x)"); }

TEST(Snnf, NegatedConstantUsesFreshVariable) {
    EXPECT_EQ(snnf_z("~eqc[5](x)"), "eqc[5](__y0) & (lt(x, __y0) | lt(__y0, x))");
}

TEST(Snnf, NegatedModulo) { EXPECT_EQ(snnf_z("~mod[1,3](x)"), "mod[0,3](x) | mod[2,3](x)"); }

TEST(Snnf, NegatedLess) { EXPECT_EQ(snnf_z("~lt(x, y)"), "lt(y, x) | eq(x, y)"); }

TEST(Snnf, IdempotentAndNegationFree) {
    const auto z = ConcreteDomain::by_name("Z");
    const Formula s = to_snnf(P("~E (~eq(x, X^1 y) U ~eqc[2](y)) | A X ~mod[0,2](x)"), z);
    EXPECT_TRUE(is_snnf(s));
    EXPECT_EQ(to_snnf(s, z), s);
}

TEST(Snnf, FreshNamesAvoidFormulaVariables) {
    const Formula s = to_snnf(P("~eqc[1](x) & ~eqc[2](y)"), ConcreteDomain::by_name("Z"));
    const auto vars = variables_of(s);
    EXPECT_NE(std::find(vars.begin(), vars.end(), "__y0"), vars.end());
    EXPECT_NE(std::find(vars.begin(), vars.end(), "__y1"), vars.end());
}

TEST(CountE, Examples) {
    const auto pe = count_e(P("p"));
    EXPECT_EQ(pe.e_count, 0);
    EXPECT_EQ(pe.d, 1);
    const auto dup = count_e(P("E X p & E X p"));
    EXPECT_EQ(dup.e_count, 1);
    EXPECT_EQ(dup.d, 2);
    const auto nested = count_e(P("E (p U E X q)"));
    EXPECT_EQ(nested.e_count, 2);
    EXPECT_EQ(nested.d, 3);
}

TEST(Abstraction, LessAcrossSuccessor) {
    const auto a = abstract_constraints(P("lt(x1, X^1 x2)"));
    ASSERT_EQ(a.table.size(), 1u);
    EXPECT_EQ(a.table[0].depth, 1);
    EXPECT_EQ(a.formula, Formula::next(Formula::prop(a.table[0].prop)));
}

TEST(Abstraction, ConstraintFree) {
    const Formula f = P("E (p U q)");
    const auto a = abstract_constraints(f);
    EXPECT_TRUE(a.table.empty());
    EXPECT_EQ(a.formula, f);
}

TEST(Abstraction, ShiftedEquality) {
    const auto table = make_abstraction_table(P("lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2)"), "p", 1);
    ASSERT_EQ(table.size(), 2u);
    EXPECT_EQ(table[1].prop, "p2");
    EXPECT_EQ(table[1].depth, 1);
    EXPECT_EQ(abstract_with(P("eq(X^1 x1, X^1 x2)"), table), P("X p2"));
}

TEST(Abstraction, ConcretizeInverts) {
    const Formula f = P("E (lt(x, X^2 y) U A X eq(X^1 x, y))");
    const auto a = abstract_constraints(f);
    EXPECT_EQ(concretize(a.formula, a.table), f);
}

TEST(Abstraction, DistinctConstraintsOnce) {
    const auto a = abstract_constraints(P("E X lt(x, y) | A G lt(x, y)"));
    EXPECT_EQ(a.table.size(), 1u);
}
