#include <gtest/gtest.h>

#include "ctlz/generators.hpp"
#include "ctlz/homcheck.hpp"
#include "ctlz/structure.hpp"

using namespace ctlz;

namespace {

SigmaStructure S(const std::string& text) { return parse_structure(text); }

// a(=0) < x < b(=c)
SigmaStructure between(std::int64_t c) {
    return S("ELEMENTS\na x b\nRELATION lt\na x\nx b\nRELATION eqc[0]\na\nRELATION eqc[" + std::to_string(c) +
             "]\nb\n");
}

std::vector<Rational> R(std::initializer_list<std::int64_t> xs) {
    std::vector<Rational> out;
    for (auto x : xs) out.emplace_back(x);
    return out;
}

}  // namespace

TEST(SimClosure, Examples) {
    const auto none = sim_closure(S("ELEMENTS\na b c\n"));
    EXPECT_EQ(std::set<int>(none.begin(), none.end()).size(), 3u);
    const auto chain = sim_closure(S("ELEMENTS\na b c\nRELATION eq\na b\nb c\n"));
    EXPECT_EQ(chain[0], chain[1]);
    EXPECT_EQ(chain[1], chain[2]);
    const auto refl = sim_closure(S("ELEMENTS\na b\nRELATION eq\na a\n"));
    EXPECT_NE(refl[0], refl[1]);
}

TEST(Quotient, Examples) {
    const auto q1 = build_quotient(S("ELEMENTS\na b\nRELATION lt\na b\n"));
    ASSERT_EQ(q1.size(), 2);
    EXPECT_EQ(q1.succ[q1.class_of[0]], std::set<int>{q1.class_of[1]});

    const auto q2 = build_quotient(S("ELEMENTS\na b c\nRELATION lt\na b\nc a\nRELATION eq\nb c\n"));
    ASSERT_EQ(q2.size(), 2);
    const int ca = q2.class_of[0], cb = q2.class_of[1];
    EXPECT_EQ(cb, q2.class_of[2]);
    EXPECT_TRUE(q2.succ[ca].count(cb));
    EXPECT_TRUE(q2.succ[cb].count(ca));

    const auto q3 = build_quotient(S("ELEMENTS\na a2\nRELATION eq\na a2\nRELATION eqc[0]\na\na2\n"));
    ASSERT_EQ(q3.size(), 1);
    EXPECT_EQ(q3.constants[0], std::set<Rational>{Rational(0)});
}

TEST(CheckCycle, Examples) {
    EXPECT_FALSE(check_cycle(build_quotient(S("ELEMENTS\na\n"))));
    const auto two = check_cycle(build_quotient(S("ELEMENTS\na b\nRELATION lt\na b\nb a\n")));
    ASSERT_TRUE(two);
    EXPECT_EQ(two->size(), 2u);
    const auto self = check_cycle(build_quotient(S("ELEMENTS\na a2\nRELATION lt\na a2\nRELATION eq\na a2\n")));
    ASSERT_TRUE(self);
    EXPECT_EQ(self->size(), 1u);
}

TEST(ModuloContradiction, Examples) {
    EXPECT_TRUE(check_modulo_contradiction(build_quotient(S("ELEMENTS\na\nRELATION mod[1,2]\na\nRELATION mod[0,2]\na\n"))));
    EXPECT_FALSE(check_modulo_contradiction(build_quotient(S("ELEMENTS\na\nRELATION mod[1,4]\na\nRELATION mod[3,6]\na\n"))));
    EXPECT_FALSE(check_modulo_contradiction(build_quotient(S("ELEMENTS\na\nRELATION mod[1,4]\na\n"))));
}

TEST(Crt, ResidueSystemFromExample) {
    EXPECT_EQ(detail::least_solution({{1, 4}, {3, 6}}), 9);
}

TEST(PartitionBgsr, Examples) {
    const auto b = partition_bgsr(between(3));
    EXPECT_EQ(b.elements(Part::B).size(), 3u);
    const auto g = partition_bgsr(S("ELEMENTS\na g\nRELATION lt\na g\nRELATION eqc[0]\na\n"));
    EXPECT_EQ(g.part[1], Part::G);
    const auto s = partition_bgsr(S("ELEMENTS\ns a\nRELATION lt\ns a\nRELATION eqc[0]\na\n"));
    EXPECT_EQ(s.part[0], Part::S);
    const auto r = partition_bgsr(S("ELEMENTS\na b\nRELATION lt\na b\n"));
    EXPECT_EQ(r.elements(Part::R).size(), 2u);
}

TEST(SolveBounded, Examples) {
    const auto run = [](const SigmaStructure& a) {
        const auto q = build_quotient(a);
        return solve_bounded(q, std::vector<char>(q.size(), 1), 0, 3);
    };
    const auto two = run(S("ELEMENTS\na x y b\nRELATION lt\na x\nx y\ny b\nRELATION eqc[0]\na\nRELATION eqc[3]\nb\n"));
    ASSERT_TRUE(two.feasible);
    EXPECT_EQ(two.value.at(1), 1);
    EXPECT_EQ(two.value.at(2), 2);
    EXPECT_FALSE(run(S("ELEMENTS\na x y z b\nRELATION lt\na x\nx y\ny z\nz b\nRELATION eqc[0]\na\nRELATION eqc[3]\nb\n")).feasible);
    const auto odd = run(S("ELEMENTS\na x b\nRELATION lt\na x\nx b\nRELATION eqc[0]\na\nRELATION eqc[3]\nb\nRELATION mod[1,2]\nx\n"));
    ASSERT_TRUE(odd.feasible);
    EXPECT_EQ(odd.value.at(1), 1);
}

TEST(DecideHom, Examples) {
    const auto one = decide_hom(S("ELEMENTS\na\n"), Target::Z);
    ASSERT_TRUE(one.yes);
    EXPECT_EQ(*one.witness, R({0}));

    const auto cyc = decide_hom(S("ELEMENTS\na b\nRELATION lt\na b\nb a\n"), Target::Z);
    EXPECT_FALSE(cyc.yes);
    EXPECT_EQ(cyc.reason->kind, HomReason::Kind::Cycle);

    const auto z = decide_hom(between(1), Target::Z);
    EXPECT_FALSE(z.yes);
    EXPECT_EQ(z.reason->kind, HomReason::Kind::BoundedInfeasible);
    EXPECT_FALSE(brute_force_hom(between(1), 5, Target::Z));

    const auto q = decide_hom(between(1), Target::Q);
    ASSERT_TRUE(q.yes);
    EXPECT_EQ((*q.witness)[1], Rational(1, 2));
    EXPECT_TRUE(verify_hom(between(1), *q.witness, Target::Q));
}

TEST(DecideHom, FailureReasons) {
    const auto clash = decide_hom(S("ELEMENTS\na b\nRELATION eq\na b\nRELATION eqc[0]\na\nRELATION eqc[1]\nb\n"), Target::Z);
    EXPECT_EQ(clash.reason->kind, HomReason::Kind::ConstantClash);
    const auto mod = decide_hom(S("ELEMENTS\na\nRELATION mod[1,2]\na\nRELATION mod[0,2]\na\n"), Target::Z);
    EXPECT_EQ(mod.reason->kind, HomReason::Kind::ModuloContradiction);
    const auto order = decide_hom(S("ELEMENTS\na b\nRELATION lt\na b\nRELATION eqc[2]\na\nRELATION eqc[1]\nb\n"), Target::Q);
    EXPECT_EQ(order.reason->kind, HomReason::Kind::OrderConstantConflict);
}

TEST(DecideHom, NaturalNumbersNeedLeastElement) {
    const auto a = S("ELEMENTS\na b c\nRELATION lt\na b\nb c\n");
    const auto n = decide_hom(a, Target::N);
    ASSERT_TRUE(n.yes);
    for (const auto& v : *n.witness) EXPECT_GE(v, Rational(0));
    const auto neg = decide_hom(a, Target::NegZ);
    ASSERT_TRUE(neg.yes);
    for (const auto& v : *neg.witness) EXPECT_LT(v, Rational(0));
}

TEST(DecideHom, SignatureCheckedPerTarget) {
    EXPECT_THROW(decide_hom(S("ELEMENTS\na\nRELATION mod[0,2]\na\n"), Target::Q), DomainError);
    EXPECT_THROW(decide_hom(S("ELEMENTS\na\nRELATION eqc[-1]\na\n"), Target::N), DomainError);
}

TEST(VerifyHom, Examples) {
    const auto lt = S("ELEMENTS\na b\nRELATION lt\na b\n");
    EXPECT_FALSE(verify_hom(lt, R({0, 0}), Target::Z));
    EXPECT_TRUE(verify_hom(lt, R({0, 1}), Target::Z));
    EXPECT_FALSE(verify_hom(S("ELEMENTS\na\nRELATION mod[1,2]\na\n"), R({4}), Target::Z));
    EXPECT_FALSE(verify_hom(lt, R({-2, -1}), Target::N));
}

TEST(BruteForce, Examples) {
    EXPECT_EQ(*brute_force_hom(S("ELEMENTS\na b\nRELATION lt\na b\n"), 1, Target::Z), R({-1, 0}));
    EXPECT_FALSE(brute_force_hom(S("ELEMENTS\na\nRELATION lt\na a\n"), 4, Target::Z));
    const auto w = brute_force_hom(between(3), 3, Target::Z);
    ASSERT_TRUE(w);
    EXPECT_TRUE((*w)[1] == Rational(1) || (*w)[1] == Rational(2));
}

TEST(DecideHom, AgreesWithBruteForceOnRandomStructures) {
    gen::Rng rng(7);
    int yes = 0;
    for (int i = 0; i < 400; ++i) {
        const auto a = gen::random_sigma0_structure(rng, gen::uniform(rng, 1, 4));
        const auto d = decide_hom(a, Target::Z);
        const auto b = brute_force_hom(a, witness_bound(a), Target::Z);
        ASSERT_EQ(d.yes, b.has_value()) << format_structure(a);
        if (d.yes) {
            ++yes;
            EXPECT_TRUE(verify_hom(a, *d.witness, Target::Z));
        }
    }
    EXPECT_GT(yes, 50);
    EXPECT_LT(yes, 390);
}
