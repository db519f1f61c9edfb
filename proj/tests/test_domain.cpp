#include <gtest/gtest.h>

#include "ctlz/domain.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"

using namespace ctlz;

namespace {

Element I(std::int64_t v) { return {Rational(v)}; }
Element T(std::int64_t a, std::int64_t b) { return {Rational(a), Rational(b)}; }

}  // namespace

TEST(Domain, ByName) {
    for (const char* n : {"Z", "N", "negZ", "Q", "allenZ", "lexZ[3]"})
        EXPECT_EQ(ConcreteDomain::by_name(n).name(), n);
    EXPECT_THROW(ConcreteDomain::by_name("R"), DomainError);
    EXPECT_THROW(ConcreteDomain::by_name("lexZ[x]"), DomainError);
}

TEST(Domain, EvalIntegers) {
    const auto z = ConcreteDomain::by_name("Z");
    EXPECT_TRUE(z.eval(RelationSymbol::less(), {I(1), I(2)}));
    EXPECT_FALSE(z.eval(RelationSymbol::less(), {I(2), I(2)}));
    EXPECT_TRUE(z.eval(RelationSymbol::modulo(1, 2), {I(7)}));
    EXPECT_TRUE(z.eval(RelationSymbol::modulo(1, 2), {I(-3)}));
    EXPECT_TRUE(z.eval(RelationSymbol::constant_eq(Rational(-4)), {I(-4)}));
}

TEST(Domain, Membership) {
    EXPECT_TRUE(ConcreteDomain::by_name("N").contains(I(0)));
    EXPECT_FALSE(ConcreteDomain::by_name("N").contains(I(-1)));
    EXPECT_TRUE(ConcreteDomain::by_name("negZ").contains(I(-1)));
    EXPECT_FALSE(ConcreteDomain::by_name("negZ").contains(I(0)));
    EXPECT_TRUE(ConcreteDomain::by_name("Q").contains({Rational(1, 2)}));
    EXPECT_FALSE(ConcreteDomain::by_name("Z").contains({Rational(1, 2)}));
    EXPECT_TRUE(ConcreteDomain::by_name("allenZ").contains(T(0, 1)));
    EXPECT_FALSE(ConcreteDomain::by_name("allenZ").contains(T(1, 1)));
}

TEST(Domain, AllenBefore) {
    const auto a = ConcreteDomain::by_name("allenZ");
    const auto before = RelationSymbol::interpreted("before", 2);
    EXPECT_TRUE(a.eval(before, {T(0, 1), T(2, 3)}));
    EXPECT_FALSE(a.eval(before, {T(0, 2), T(2, 3)}));
    EXPECT_TRUE(a.eval(RelationSymbol::interpreted("meets", 2), {T(0, 2), T(2, 3)}));
}

TEST(Domain, AllenRelationsPartitionPairs) {
    const auto a = ConcreteDomain::by_name("allenZ");
    for (int s1 = -2; s1 <= 2; ++s1)
        for (int e1 = s1 + 1; e1 <= 2; ++e1)
            for (int s2 = -2; s2 <= 2; ++s2)
                for (int e2 = s2 + 1; e2 <= 2; ++e2) {
                    int hits = 0;
                    for (const auto& r : allen_relations())
                        hits += a.eval(RelationSymbol::interpreted(r.name, 2), {T(s1, e1), T(s2, e2)});
                    EXPECT_EQ(hits, 1);
                }
}

TEST(Domain, LexOrderMatchesTupleComparison) {
    const auto lex = ConcreteDomain::by_name("lexZ[2]");
    const auto lt = RelationSymbol::interpreted("ltlex", 2);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c)
                for (int d = -2; d <= 2; ++d)
                    EXPECT_EQ(lex.eval(lt, {T(a, b), T(c, d)}), std::pair(a, b) < std::pair(c, d));
}

TEST(Domain, NegationTable) {
    const auto z = ConcreteDomain::by_name("Z");
    EXPECT_EQ(z.negation(RelationSymbol::equal()).fresh_count, 0);
    EXPECT_EQ(z.negation(RelationSymbol::less()).fresh_count, 0);
    EXPECT_EQ(z.negation(RelationSymbol::constant_eq(Rational(3))).fresh_count, 1);
}

TEST(Domain, NegationIsComplementOnSmallValues) {
    const auto z = ConcreteDomain::by_name("Z");
    const std::vector<RelationSymbol> rels = {RelationSymbol::less(), RelationSymbol::equal(),
                                              RelationSymbol::constant_eq(Rational(1)), RelationSymbol::modulo(2, 3)};
    for (const auto& r : rels) {
        const auto neg = z.negation(r);
        for (int a = -3; a <= 3; ++a)
            for (int b = -3; b <= 3; ++b) {
                std::vector<Element> params = {I(a)};
                if (r.arity == 2) params.push_back(I(b));
                else if (b != 0) continue;
                const bool direct = z.eval(r, params);
                bool witnessed = false;
                for (int f = -4; f <= 4 && !witnessed; ++f) {
                    std::vector<Element> fresh;
                    if (neg.fresh_count == 1) fresh.push_back(I(f));
                    else if (f != 0) continue;
                    witnessed = eval_positive(neg.body, params, fresh, [&](const RelationSymbol& s,
                                                                                   const std::vector<Element>& t) {
                        return z.eval(s, t);
                    });
                }
                EXPECT_NE(direct, witnessed) << r.token() << " " << a << " " << b;
            }
    }
}

TEST(Interpretation, LexExpansion) {
    const auto in = ConcreteDomain::by_name("lexZ[2]").interpretation();
    ASSERT_TRUE(in.has_value());
    const Formula f = apply_interpretation(*in, parse_path_formula("ltlex(x, X^1 y)"));
    EXPECT_EQ(f, parse_path_formula("lt(x_1, X^1 y_1) | eq(x_1, X^1 y_1) & lt(x_2, X^1 y_2)"));
}

TEST(Interpretation, AllenMeetsAddsDomainConjunct) {
    const auto in = ConcreteDomain::by_name("allenZ").interpretation();
    ASSERT_TRUE(in.has_value());
    EXPECT_FALSE(in->domain_total);
    const Formula f = apply_interpretation(*in, parse_formula("E X meets(i, X^1 j)"));
    const std::string s = to_string(f);
    EXPECT_NE(s.find("eq(i_2, X^1 j_1)"), std::string::npos) << s;
    EXPECT_NE(s.find("lt(i_1, i_2)"), std::string::npos) << s;
    EXPECT_NE(s.find("lt(j_1, j_2)"), std::string::npos) << s;
}

TEST(Interpretation, NumericDomainsHaveNone) {
    EXPECT_FALSE(ConcreteDomain::by_name("Z").interpretation().has_value());
}
