#include <gtest/gtest.h>

#include "ctlz/generators.hpp"
#include "ctlz/homcheck.hpp"
#include "ctlz/mso.hpp"
#include "ctlz/mso_emit.hpp"
#include "ctlz/mso_eval.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"

using namespace ctlz;

namespace {

const MsoBinary kLess{parse_mso("(lt x y)"), "x", "y"};

SigmaStructure S(const std::string& text) { return parse_structure(text); }

bool eval_ab(const Mso& f, const SigmaStructure& a, const std::string& x, const std::string& y) {
    MsoAssignment asg;
    asg.fo["a"] = a.index_of(x);
    asg.fo["b"] = a.index_of(y);
    return eval_finite(f, a, asg);
}

std::set<RelationSymbol> sigma0_set() {
    return std::set<RelationSymbol>(gen::sigma0().begin(), gen::sigma0().end());
}

}  // namespace

TEST(MsoSyntax, RoundTrip) {
    for (const char* s : {"(exists x (lt x y))", "(forallset X (implies (in x X) (eqc[0] x)))",
                          "(B X (and (not (= x y)) (or true false)))", "(mod[1,2] x)"}) {
        const Mso f = parse_mso(s);
        EXPECT_EQ(parse_mso(to_string(f)), f) << s;
        EXPECT_EQ(parse_mso(to_pretty_string(f)), f) << s;
    }
    EXPECT_THROW(parse_mso("(exists x"), ParseError);
    EXPECT_THROW(parse_mso("exists x (lt x x)"), ParseError);
}

TEST(MsoSyntax, Classifier) {
    EXPECT_EQ(classify(parse_mso("(existsset X (in x X))")), MsoClass::Mso);
    EXPECT_EQ(classify(parse_mso("(B X (in x X))")), MsoClass::WmsoB);
    EXPECT_EQ(classify(parse_mso("(and (existsset X (in x X)) (B Y (in x Y)))")), MsoClass::Boolean);
}

TEST(CoreFormulas, ReachOnChain) {
    const auto chain = S("ELEMENTS\na b c\nRELATION lt\na b\nb c\n");
    const Mso reach = emit_core_formula(CoreKind::Reach, kLess);
    EXPECT_TRUE(eval_ab(reach, chain, "a", "c"));
    EXPECT_FALSE(eval_ab(reach, chain, "c", "a"));
}

TEST(CoreFormulas, ECycle) {
    const Mso ecycle = emit_core_formula(CoreKind::ECycle, kLess);
    EXPECT_TRUE(eval_finite(ecycle, S("ELEMENTS\na b\nRELATION lt\na b\nb a\n")));
    EXPECT_FALSE(eval_finite(ecycle, S("ELEMENTS\na b c\nRELATION lt\na b\nb c\n")));
}

TEST(CoreFormulas, BPathsOnFiniteStructures) {
    const Mso bpaths = emit_core_formula(CoreKind::BPaths, kLess);
    EXPECT_EQ(classify(bpaths), MsoClass::WmsoB);
    const auto a = S("ELEMENTS\na b c\nRELATION lt\na b\nb c\nc a\n");
    for (const char* x : {"a", "b", "c"})
        for (const char* y : {"a", "b", "c"}) EXPECT_TRUE(eval_ab(bpaths, a, x, y));
}

TEST(HomSentence, OrderOnlyHasTwoConjuncts) {
    const Mso s = emit_hom_sentence({RelationSymbol::less()}, HomTarget::ZOrderOnly);
    ASSERT_EQ(s.kind(), Mso::Kind::And);
    EXPECT_EQ(s.kids().size(), 2u);
}

TEST(HomSentence, SingleConstant) {
    const auto parts = emit_hom_sentence_parts({RelationSymbol::less(), RelationSymbol::constant_eq(Rational(0))}, HomTarget::Z);
    EXPECT_EQ(parts.phi_mod.kind(), Mso::Kind::True);
    EXPECT_EQ(parts.set_vars.size(), 1u);
}

TEST(HomSentence, ConstantsAndModulus) {
    const auto parts = emit_hom_sentence_parts({RelationSymbol::less(), RelationSymbol::constant_eq(Rational(0)),
                                                RelationSymbol::constant_eq(Rational(3)), RelationSymbol::modulo(1, 2)},
                                               HomTarget::Z);
    EXPECT_EQ(parts.set_vars.size(), 4u);
}

TEST(HomSentence, BoundedInfeasibleIsFalse) {
    const auto a = S("ELEMENTS\na x b\nRELATION lt\na x\nx b\nRELATION eqc[0]\na\nRELATION eqc[1]\nb\n");
    EXPECT_FALSE(eval_finite(emit_hom_sentence(a.signature(), HomTarget::Z), a));
    EXPECT_FALSE(decide_hom(a, Target::Z).yes);
}

TEST(HomSentence, AgreesWithDecisionProcedure) {
    const Mso sentence = emit_hom_sentence(sigma0_set(), HomTarget::Z);
    MsoEvaluator ev;
    gen::Rng rng(11);
    for (int i = 0; i < 150; ++i) {
        const auto a = gen::random_sigma0_structure(rng, gen::uniform(rng, 1, 5));
        EXPECT_EQ(ev.eval(sentence, a), decide_hom(a, Target::Z).yes) << format_structure(a);
    }
}

TEST(HomSentence, NaturalAndNegativeTargets) {
    const std::set<RelationSymbol> sigma = {RelationSymbol::less(), RelationSymbol::equal()};
    const Mso n = emit_hom_sentence(sigma, HomTarget::N);
    const Mso neg = emit_hom_sentence(sigma, HomTarget::NegZ);
    gen::Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto full = gen::random_sigma0_structure(rng, gen::uniform(rng, 1, 5));
        SigmaStructure a(full.elements());
        for (const auto& r : sigma) {
            a.declare(r);
            for (const auto& t : full.tuples(r)) a.add(r, t);
        }
        EXPECT_EQ(eval_finite(n, a), decide_hom(a, Target::N).yes);
        EXPECT_EQ(eval_finite(neg, a), decide_hom(a, Target::NegZ).yes);
    }
}

TEST(Relativize, Syntax) {
    NameGen names;
    const MsoUnary q{parse_mso("(q z)"), "z"};
    EXPECT_EQ(relativize(parse_mso("(exists x (r x x))"), q, names), parse_mso("(exists x (and (q x) (r x x)))"));
    const Mso set = relativize(parse_mso("(forallset X (in y X))"), q, names);
    ASSERT_EQ(set.kind(), Mso::Kind::ForallSet);
    EXPECT_EQ(set.body().kind(), Mso::Kind::Implies);
}

TEST(Relativize, MatchesInducedSubstructure) {
    const MsoUnary guard{parse_mso("(mod[0,2] z)"), "z"};
    const std::vector<Mso> sentences = {
        parse_mso("(exists x (exists y (lt x y)))"),
        parse_mso("(forall x (or (eqc[0] x) (exists y (eq x y))))"),
        emit_core_formula(CoreKind::ECycle, kLess),
        parse_mso("(existsset X (and (exists x (in x X)) (forall x (implies (in x X) (mod[1,3] x)))))"),
    };
    gen::Rng rng(9);
    for (int i = 0; i < 120; ++i) {
        const auto a = gen::random_sigma0_structure(rng, gen::uniform(rng, 1, 5));
        std::vector<int> keep;
        for (int e = 0; e < a.size(); ++e)
            if (a.holds(RelationSymbol::modulo(0, 2), {e})) keep.push_back(e);
        const auto sub = a.induced(keep);
        for (const auto& f : sentences) {
            NameGen names;
            EXPECT_EQ(eval_finite(relativize(f, guard, names), a), eval_finite(f, sub)) << to_string(f);
        }
    }
}

TEST(TreeEncoding, TrivialCases) {
    const auto table = make_abstraction_table(parse_path_formula("lt(x, X^1 x)"), "p", 0);
    const auto t = emit_tree_encoding(Mso::top(), 1, 1, table, {"x"}, {});
    EXPECT_EQ(t.alpha_e.kind(), Mso::Kind::True);
    const auto two = emit_tree_encoding(Mso::top(), 2, 1, {}, {"x", "y"}, {});
    ASSERT_EQ(two.q.body.kind(), Mso::Kind::Or);
    EXPECT_EQ(two.q.body.kids().size(), 2u);
    for (const auto& k : two.q.body.kids()) EXPECT_EQ(k.kind(), Mso::Kind::Atom);
}

TEST(TreeEncoding, SingleVariableUnaryTree) {
    const auto t = emit_tree_encoding(Mso::top(), 1, 1, {}, {"x"}, {});
    const std::string beta = to_string(t.beta);
    EXPECT_NE(beta.find(succ_name(2)), std::string::npos);
    EXPECT_NE(beta.find(copy_prop(1)), std::string::npos);
}

TEST(TreeEncoding, AgreesWithConstraintGraph) {
    const auto table = make_abstraction_table(parse_path_formula("lt(x, X^1 x) & eq(x, X^1 x)"), "p", 0);
    const std::vector<Mso> alphas = {
        parse_mso("(exists u (exists v (lt u v)))"),
        parse_mso("(forall u (exists v (or (lt u v) (lt v u))))"),
        parse_mso("(exists u (exists v (and (eq u v) (not (= u v)))))"),
        parse_mso("(existsset X (and (exists u (in u X)) (forall u (forall v (implies (and (in u X) (lt u v)) (in v X))))))"),
    };
    gen::Rng rng(3);
    int agreements_true = 0;
    for (int b : {1, 2})
        for (int i = 0; i < 6; ++i) {
            const auto ta = abstract_model(gen::random_tree(rng, b, 1, {"x"}, 1), table, ConcreteDomain::by_name("Z"));
            const auto g = extract_constraint_graph(ta, table, {"x"});
            const auto te = finite_extended_tree(ta, {"x"});
            ASSERT_LE(te.size(), 6);
            for (const auto& alpha : alphas) {
                const auto enc = emit_tree_encoding(alpha, 1, b, table, {"x"}, {});
                EXPECT_TRUE(eval_finite(enc.beta, te));
                const bool direct = eval_finite(alpha, g);
                EXPECT_EQ(eval_finite(enc.alpha_e, te), direct) << to_string(alpha);
                agreements_true += direct;
            }
        }
    EXPECT_GT(agreements_true, 0);
}

TEST(Evaluator, SetLimit) {
    const auto a = gen::sigma0_structure_from_bits(6, 0);
    MsoEvalOptions opt;
    opt.max_set_elements = 4;
    EXPECT_THROW(eval_finite(parse_mso("(existsset X (forall x (in x X)))"), a, {}, opt), LimitError);
}

TEST(Evaluator, FreeVariablesMustBeAssigned) {
    EXPECT_THROW(eval_finite(parse_mso("(lt x y)"), S("ELEMENTS\na\n")), Error);
}
