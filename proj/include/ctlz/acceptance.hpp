#pragma once

// The acceptance suite: ten property and oracle checks over the whole
// library, shared by the acceptance binary and `ctlz selftest`.

#include <chrono>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctlz/domain.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/generators.hpp"
#include "ctlz/homcheck.hpp"
#include "ctlz/model.hpp"
#include "ctlz/modelcheck.hpp"
#include "ctlz/mso_emit.hpp"
#include "ctlz/mso_eval.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"
#include "ctlz/satsearch.hpp"
#include "ctlz/structure.hpp"

namespace ctlz::acceptance {

struct Options {
    /// Scales every randomized corpus down by roughly 10x.
    bool quick = false;
    std::uint64_t seed = 1;
};

struct Result {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

namespace detail {

inline int scaled(const Options& o, int full) { return o.quick ? std::max(1, full / 10) : full; }

/// Three-element σ₀ structures sampled beyond the exhaustive range.
inline constexpr int kSampledThreeElement = 200000;

struct HomSweep {
    std::int64_t structures = 0, agree = 0, yes = 0, witness_ok = 0, witness_in_bound = 0;
    std::vector<std::string> failures;
};

inline void hom_case(const SigmaStructure& a, HomSweep& s) {
    ++s.structures;
    const std::int64_t k = witness_bound(a);
    const HomDecision d = decide_hom(a, Target::Z);
    const bool oracle = brute_force_hom(a, k, Target::Z).has_value();
    if (d.yes == oracle)
        ++s.agree;
    else if (s.failures.size() < 3)
        s.failures.push_back("decide=" + std::to_string(d.yes) + " oracle=" + std::to_string(oracle) + "\n" +
                             format_structure(a));
    if (!d.yes) return;
    ++s.yes;
    if (d.witness && verify_hom(a, *d.witness, Target::Z)) ++s.witness_ok;
    bool inside = d.witness.has_value();
    if (inside)
        for (const auto& v : *d.witness) inside = inside && Rational(-k) <= v && v <= Rational(k);
    if (inside) ++s.witness_in_bound;
}

inline const HomSweep& hom_sweep(const Options& o) {
    static std::map<std::pair<bool, std::uint64_t>, HomSweep> cache;
    const auto key = std::make_pair(o.quick, o.seed);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    HomSweep s;
    for (int n = 1; n <= 2; ++n)
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << gen::sigma0_bit_count(n)); ++b)
            hom_case(gen::sigma0_structure_from_bits(n, b), s);
    gen::Rng rng(o.seed);
    const int bits3 = gen::sigma0_bit_count(3);
    for (int i = 0; i < scaled(o, kSampledThreeElement); ++i) {
        // Varying density keeps both verdicts frequent.
        const double p = std::uniform_real_distribution<double>(0.02, 0.5)(rng);
        std::uint64_t b = 0;
        for (int j = 0; j < bits3; ++j)
            if (gen::chance(rng, p)) b |= std::uint64_t{1} << j;
        hom_case(gen::sigma0_structure_from_bits(3, b), s);
    }
    for (int i = 0; i < scaled(o, 10000); ++i) hom_case(gen::random_sigma0_structure(rng, gen::uniform(rng, 4, 5)), s);
    return cache.emplace(key, std::move(s)).first->second;
}

inline std::string sweep_summary(const HomSweep& s) {
    std::ostringstream out;
    out << s.structures << " structures, " << s.yes << " yes";
    return out.str();
}

inline std::set<RelationSymbol> sigma0_set() { return {gen::sigma0().begin(), gen::sigma0().end()}; }

inline std::vector<int> complement(int n, const std::vector<int>& vs) {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (std::find(vs.begin(), vs.end(), v) == vs.end()) out.push_back(v);
    return out;
}

/// Count of negated constraints after NNF.
inline int negated_constraints(const Formula& f) {
    int n = 0;
    visit_preorder(to_nnf(f), [&](const Formula& g) {
        if (g.op() == Op::Not && g.sub().op() == Op::Atom) ++n;
    });
    return n;
}

/// Copy of `c` restricted to the variables `vars`.
inline ConstraintKripke project(const ConstraintKripke& c, const std::vector<std::string>& vars) {
    ConstraintKripke out(vars);
    for (int v = 0; v < c.size(); ++v) {
        out.add_node(c.node(v));
        for (const auto& p : c.labels(v)) out.add_label(v, p);
        for (std::size_t x = 0; x < vars.size(); ++x) out.set_register(v, static_cast<int>(x), c.reg(v, c.var_index(vars[x])));
    }
    for (int v = 0; v < c.size(); ++v)
        for (int u : c.successors(v)) out.add_edge(v, u);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Criteria

inline Result homcheck_vs_oracle(const Options& o) {
    const auto& s = detail::hom_sweep(o);
    Result r{1, "homcheck agrees with the brute-force oracle", s.agree == s.structures, {}, 0};
    r.detail = detail::sweep_summary(s) + ", " + std::to_string(s.agree) + " agree";
    for (const auto& f : s.failures) r.detail += "\n" + f;
    return r;
}

inline Result witness_soundness(const Options& o) {
    const auto& s = detail::hom_sweep(o);
    Result r{2, "yes-witnesses verify and stay within K", s.witness_ok == s.yes && s.witness_in_bound == s.yes, {}, 0};
    r.detail = std::to_string(s.yes) + " witnesses, " + std::to_string(s.witness_ok) + " verified, " +
               std::to_string(s.witness_in_bound) + " within K";
    return r;
}

inline Result three_way_oracle(const Options& o) {
    const Mso sentence = emit_hom_sentence(detail::sigma0_set(), HomTarget::Z);
    MsoEvaluator ev;
    gen::Rng rng(o.seed + 3);
    const int count = detail::scaled(o, 1000);
    int agree = 0, yes = 0;
    std::string failure;
    for (int i = 0; i < count; ++i) {
        const SigmaStructure a = gen::random_sigma0_structure(rng, gen::uniform(rng, 1, 8));
        const bool e = ev.eval(sentence, a);
        const bool d = decide_hom(a, Target::Z).yes;
        const bool b = brute_force_hom(a, witness_bound(a), Target::Z).has_value();
        if (e == d && d == b)
            ++agree;
        else if (failure.empty())
            failure = "\nmso=" + std::to_string(e) + " decide=" + std::to_string(d) + " oracle=" + std::to_string(b) +
                      "\n" + format_structure(a);
        yes += d;
    }
    return {3, "MSO sentence, decide_hom and brute force agree", agree == count,
            std::to_string(agree) + "/" + std::to_string(count) + " agree, " + std::to_string(yes) + " yes, sentence size " +
                std::to_string(mso_size(sentence)) + failure,
            0};
}

/// The depth-3 constraint 2-tree over (N, <, =) with registers x1, x2 used by
/// the golden abstraction test.
inline const char* golden_tree_text() {
    return "SHAPE tree 2 3\nVARS x1 x2\nREGISTERS\n"
           "eps x1 1\neps x2 2\n1 x1 2\n1 x2 2\n2 x1 1\n2 x2 3\n"
           "11 x1 3\n11 x2 3\n12 x1 2\n12 x2 0\n21 x1 2\n21 x2 0\n22 x1 3\n22 x2 0\n"
           "111 x1 0\n111 x2 4\n112 x1 2\n112 x2 2\n121 x1 0\n121 x2 2\n122 x1 0\n122 x2 3\n"
           "211 x1 0\n211 x2 2\n212 x1 0\n212 x2 0\n221 x1 4\n221 x2 4\n222 x1 3\n222 x2 3\n";
}

inline Result golden_tree(const Options&) {
    const auto c = parse_model(golden_tree_text());
    const auto dom = ConcreteDomain::by_name("N");
    const auto phi = parse_formula("E (lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2))");
    const auto table = make_abstraction_table(phi, "p", 1);
    const auto t = abstract_model(c, table, dom);
    const std::map<std::string, std::set<std::string>> want = {
        {"eps", {}},          {"1", {"p1", "p2"}}, {"2", {"p1"}},   {"11", {"p1", "p2"}}, {"12", {}},
        {"21", {}},           {"22", {}},          {"111", {"p1"}}, {"112", {"p2"}},      {"121", {}},
        {"122", {"p1"}},      {"211", {}},         {"212", {"p2"}}, {"221", {"p1", "p2"}}, {"222", {"p2"}}};
    std::string bad;
    for (const auto& [node, labels] : want)
        if (t.labels(t.index_of(node)) != labels) bad += " " + node;
    const auto g = extract_constraint_graph(t, table, c.vars());
    const auto pairs = [&](const RelationSymbol& r) {
        std::set<std::pair<std::string, std::string>> out;
        for (const auto& tup : g.tuples(r)) out.emplace(g.name(tup[0]), g.name(tup[1]));
        return out;
    };
    const std::set<std::pair<std::string, std::string>> lt_want = {
        {"eps:x1", "1:x2"}, {"eps:x1", "2:x2"}, {"1:x1", "11:x2"}, {"11:x1", "111:x2"}, {"12:x1", "122:x2"}, {"22:x1", "221:x2"}};
    const std::set<std::pair<std::string, std::string>> eq_want = {
        {"1:x1", "1:x2"}, {"11:x1", "11:x2"}, {"112:x1", "112:x2"}, {"212:x1", "212:x2"}, {"221:x1", "221:x2"}, {"222:x1", "222:x2"}};
    const bool lt_ok = pairs(RelationSymbol::less()) == lt_want;
    const bool eq_ok = pairs(RelationSymbol::equal()) == eq_want;
    std::string detail = "15 node labels, 6 < edges, 6 = edges";
    if (!bad.empty()) detail += "; label mismatch at" + bad;
    if (!lt_ok) detail += "; < edges differ";
    if (!eq_ok) detail += "; = edges differ";
    return {4, "golden constraint tree: labels and G_T edges", bad.empty() && lt_ok && eq_ok, detail, 0};
}

inline Result model_checker_laws(const Options& o) {
    const auto dom = ConcreteDomain::by_name("Z");
    gen::Rng rng(o.seed + 5);
    const int count = detail::scaled(o, 500);
    gen::FormulaShape shape;
    shape.max_depth = 4;
    int oracle_ok = 0, ea_ok = 0, ur_ok = 0, contra_ok = 0;
    std::string failure;
    const auto note = [&](const std::string& what, const ConstraintKripke& c, const Formula& f) {
        if (failure.empty()) failure = "\n" + what + ": " + to_string(f) + "\n" + format_model(c);
    };
    for (int i = 0; i < count; ++i) {
        const auto c = gen::random_graph(rng, 6, shape.vars, shape.props, 2);
        const int n = c.size();

        const Formula ctl = gen::random_ctl_formula(rng, shape);
        if (check_ctlstar(c, ctl, dom) == check_ctl_oracle(c, ctl, dom))
            ++oracle_ok;
        else
            note("checker and oracle differ", c, ctl);

        gen::FormulaShape pshape = shape;
        pshape.max_depth = 3;
        const Formula psi = gen::random_path_formula(rng, pshape);
        const auto a = check_ctlstar(c, Formula::all(psi), dom);
        const auto e = check_ctlstar(c, Formula::exists(to_nnf(Formula::neg(psi))), dom);
        if (a == detail::complement(n, e))
            ++ea_ok;
        else
            note("E/A duality fails", c, psi);

        const Formula l = gen::random_path_formula(rng, pshape), r = gen::random_path_formula(rng, pshape);
        const Formula rel = Formula::exists(Formula::release(l, r));
        const Formula unrolled = Formula::exists(Formula::disj(Formula::release(Formula::bottom(), r),
                                                               Formula::until(r, Formula::conj(l, r))));
        if (check_ctlstar(c, rel, dom) == check_ctlstar(c, unrolled, dom))
            ++ur_ok;
        else
            note("release equivalence fails", c, rel);

        const Formula phi = Formula::exists(psi);
        if (check_ctlstar(c, Formula::conj(phi, Formula::neg(phi)), dom).empty())
            ++contra_ok;
        else
            note("phi & ~phi is satisfied", c, phi);
    }
    const bool pass = oracle_ok == count && ea_ok == count && ur_ok == count && contra_ok == count;
    std::ostringstream out;
    out << count << " trials: oracle " << oracle_ok << ", E/A " << ea_ok << ", release " << ur_ok << ", contradiction "
        << contra_ok << failure;
    return {5, "model checker laws and CTL oracle agreement", pass, out.str(), 0};
}

struct SuiteEntry {
    const char* formula;
    int max_nodes;
    int range;
};

inline const std::vector<SuiteEntry>& satisfiable_suite() {
    static const std::vector<SuiteEntry> s = {
        {"E F eqc[5](x)", 1, 5},
        {"E (lt(x, X^1 y) U eqc[100](y))", 2, 100},
        {"A G mod[1,2](x) & E X eqc[1](x)", 1, 3},
        {"E X lt(x, X^1 x)", 2, 3},
        {"p & A X ~p", 2, 3},
        {"E (eqc[2](x) & G eq(x, X^1 x))", 1, 3},
        {"A G (lt(x, y) & mod[0,2](y))", 1, 3},
        {"E (mod[1,3](x) U (eqc[2](x) & p))", 1, 3},
        {"A X eqc[0](x) & E lt(x, X^1 x)", 2, 3},
        {"E (G F p & G F ~p)", 2, 3},
    };
    return s;
}

inline const std::vector<SuiteEntry>& unsatisfiable_suite() {
    static const std::vector<SuiteEntry> s = {
        {"E lt(x, x)", 3, 3},
        {"(E X mod[1,2](x)) & (A X mod[0,2](x))", 3, 3},
        {"E (eqc[0](x) & eqc[2](x))", 2, 3},
        {"E (lt(x, y) & lt(y, x))", 2, 3},
        {"A G p & E F ~p", 3, 3},
        {"E (mod[0,2](x) & mod[1,2](x))", 2, 3},
        {"E (eq(x, X^1 y) & lt(X^1 y, x))", 2, 3},
        {"p & ~p", 3, 3},
        {"E (eqc[2](x) & mod[1,2](x))", 2, 3},
        {"E (lt(x, y) & eq(y, z) & lt(z, x))", 2, 3},
    };
    return s;
}

inline Result sat_suite(const Options&) {
    const auto dom = ConcreteDomain::by_name("Z");
    int sat_ok = 0, unsat_ok = 0;
    std::string bad;
    for (const auto& e : satisfiable_suite()) {
        const Formula f = parse_formula(e.formula);
        const auto m = find_model(f, dom, e.max_nodes, e.range);
        bool ok = false;
        if (m) {
            const auto nodes = check_ctlstar(m->model, f, dom);
            ok = std::find(nodes.begin(), nodes.end(), m->node) != nodes.end();
        }
        if (ok)
            ++sat_ok;
        else
            bad += "\nno confirmed model: " + std::string(e.formula);
    }
    for (const auto& e : unsatisfiable_suite()) {
        if (!find_model(parse_formula(e.formula), dom, e.max_nodes, e.range))
            ++unsat_ok;
        else
            bad += "\nunexpected model: " + std::string(e.formula);
    }
    const int ns = static_cast<int>(satisfiable_suite().size()), nu = static_cast<int>(unsatisfiable_suite().size());
    return {6, "satisfiable suite finds models, unsatisfiable suite none", sat_ok == ns && unsat_ok == nu,
            std::to_string(sat_ok) + "/" + std::to_string(ns) + " models confirmed, " + std::to_string(unsat_ok) + "/" +
                std::to_string(nu) + " without model" + bad,
            0};
}

/// Node bound for the SNNF preservation sweep.
inline constexpr int kSnnfNodes = 2;

inline Result snnf_preservation(const Options& o) {
    const auto dom = ConcreteDomain::by_name("Z");
    gen::Rng rng(o.seed + 7);
    gen::FormulaShape shape;
    shape.props = {"p"};
    shape.max_depth = 3;
    const int count = detail::scaled(o, 200);
    // Constants of σ₀ lie in [0, 2], so the range is max(2, 5).
    const int range = 5;
    int agree = 0, projected = 0, models = 0, negated = 0;
    std::string failure;
    for (int i = 0; i < count; ++i) {
        Formula f;
        do {
            f = gen::random_ctl_formula(rng, shape);
            // Most trials carry at least one negated constraint.
            if (gen::chance(rng, 0.8)) {
                const Formula neg =
                    Formula::exists(Formula::neg(Formula::atom(gen::random_sigma0_constraint(rng, shape.vars, 1))));
                f = gen::chance(rng, 0.5) ? Formula::conj(f, neg) : Formula::disj(neg, f);
            }
        } while (detail::negated_constraints(f) > 2);
        negated += detail::negated_constraints(f) > 0;
        const Formula s = to_snnf(f, dom);
        const auto mf = find_model(f, dom, kSnnfNodes, range);
        const auto ms = find_model(s, dom, kSnnfNodes, range);
        if (mf.has_value() == ms.has_value())
            ++agree;
        else if (failure.empty())
            failure = "\nsearch differs on " + to_string(f);
        if (!ms) continue;
        ++models;
        const auto proj = detail::project(ms->model, variables_of(f));
        const auto nodes = check_ctlstar(proj, f, dom);
        if (std::find(nodes.begin(), nodes.end(), ms->node) != nodes.end())
            ++projected;
        else if (failure.empty())
            failure = "\nprojection fails on " + to_string(f);
    }
    return {7, "snnf preserves bounded satisfiability", agree == count && projected == models,
            std::to_string(agree) + "/" + std::to_string(count) + " agree (" + std::to_string(negated) +
                " with negated constraints), " + std::to_string(projected) + "/" + std::to_string(models) +
                " projected models confirmed" + failure,
            0};
}

inline Result z_q_contrast(const Options&) {
    const SigmaStructure a = parse_structure("ELEMENTS\na x b\nRELATION lt\na x\nx b\nRELATION eqc[0] 1\na\nRELATION eqc[1] 1\nb\n");
    const HomDecision z = decide_hom(a, Target::Z);
    const HomDecision q = decide_hom(a, Target::Q);
    const bool z_ok = !z.yes && z.reason && z.reason->kind == HomReason::Kind::BoundedInfeasible;
    const bool q_ok = q.yes && q.witness && verify_hom(a, *q.witness, Target::Q);
    std::string detail = "Z: " + std::string(z.yes ? "yes" : "no");
    if (z.reason) detail += " (" + reason_name(z.reason->kind) + ")";
    detail += ", Q: " + std::string(q.yes ? "yes" : "no");
    if (q.witness) {
        detail += " [";
        for (std::size_t i = 0; i < q.witness->size(); ++i) detail += (i ? " " : "") + (*q.witness)[i].str();
        detail += "]";
    }
    return {8, "Z/Q contrast on a(=0) < x < b(=1)", z_ok && q_ok, detail, 0};
}

inline Result interpretation_round_trip(const Options& o) {
    gen::Rng rng(o.seed + 9);
    const auto z = ConcreteDomain::by_name("Z");
    int lex_ok = 0, allen_ok = 0, lex_sat = 0, allen_sat = 0;
    std::string failure;
    const auto run = [&](const ConcreteDomain& dom, const std::vector<RelationSymbol>& rels, int count, int range,
                         int& ok, int& sat) {
        const auto in = *dom.interpretation();
        for (int i = 0; i < count; ++i) {
            const auto atom = [&]() {
                const auto& r = rels[gen::uniform(rng, 0, static_cast<int>(rels.size()) - 1)];
                const std::vector<std::string> vars = {"x", "y"};
                Constraint c{r, {}};
                for (int k = 0; k < 2; ++k) c.args.push_back(Term{gen::uniform(rng, 0, 1), vars[gen::uniform(rng, 0, 1)]});
                return Formula::atom(c);
            };
            Formula path = atom();
            switch (gen::uniform(rng, 0, 3)) {
                case 0: path = Formula::conj(path, Formula::next(atom())); break;
                case 1: path = Formula::until(path, atom()); break;
                case 2: path = Formula::release(Formula::bottom(), path); break;
                default: path = Formula::disj(path, Formula::neg(atom())); break;
            }
            const Formula f = gen::chance(rng, 0.7) ? Formula::exists(path) : Formula::all(path);
            const Formula snnf = to_snnf(f, dom);
            const auto direct = find_model(snnf, dom, 2, range);
            const auto via = find_model(apply_interpretation(in, snnf), z, 2, range);
            if (direct.has_value() == via.has_value())
                ++ok;
            else if (failure.empty())
                failure = "\n" + dom.name() + " differs on " + to_string(f);
            sat += direct.has_value();
        }
    };
    const auto lex = ConcreteDomain::by_name("lexZ[2]");
    run(lex, lex.named_symbols(), detail::scaled(o, 20), 1, lex_ok, lex_sat);
    const auto allen = ConcreteDomain::by_name("allenZ");
    run(allen, allen.named_symbols(), detail::scaled(o, 10), 2, allen_ok, allen_sat);
    const int nl = detail::scaled(o, 20), na = detail::scaled(o, 10);
    return {9, "interpretation round trip for lex-Z^2 and Allen", lex_ok == nl && allen_ok == na,
            "lex " + std::to_string(lex_ok) + "/" + std::to_string(nl) + " (" + std::to_string(lex_sat) + " sat), Allen " +
                std::to_string(allen_ok) + "/" + std::to_string(na) + " (" + std::to_string(allen_sat) + " sat)" + failure,
            0};
}

inline Result reduction_harness(const Options& o) {
    const auto dom = ConcreteDomain::by_name("Z");
    gen::Rng rng(o.seed + 11);
    const int count = detail::scaled(o, 1000);
    int clean = 0, premise = 0, backward = 0;
    std::string failure;
    const std::vector<std::string> vars = {"x", "y"};
    for (int i = 0; i < count; ++i) {
        const auto t = gen::random_tree(rng, 2, 2, vars, 3);
        const Formula f = gen::random_x_formula(rng, vars, {}, 2);
        const auto rep = reduction_consistency(t, f, dom, 4, rng());
        premise += rep.premise;
        backward += rep.backward_cases;
        if (rep.ok())
            ++clean;
        else if (failure.empty())
            failure = "\n" + rep.violations.front() + " on " + to_string(f) + "\n" + format_model(t);
    }
    return {10, "reduction harness reports no violations", clean == count,
            std::to_string(clean) + "/" + std::to_string(count) + " clean, " + std::to_string(premise) +
                " with (C,root) satisfying the formula, " + std::to_string(backward) + " backward cases" + failure,
            0};
}

/// Runs all criteria in order; `on_result` sees each result as it finishes.
inline std::vector<Result> run_all(const Options& o, const std::function<void(const Result&)>& on_result = {}) {
    const std::vector<std::function<Result(const Options&)>> criteria = {
        homcheck_vs_oracle, witness_soundness,  three_way_oracle,          golden_tree,      model_checker_laws,
        sat_suite,          snnf_preservation,  z_q_contrast,              interpretation_round_trip, reduction_harness};
    std::vector<Result> out;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c(o);
        } catch (const std::exception& e) {
            r.id = static_cast<int>(out.size()) + 1;
            r.name = "criterion " + std::to_string(r.id);
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string format_result(const Result& r) {
    std::ostringstream out;
    out << (r.passed ? "PASS" : "FAIL") << " " << r.id << " " << r.name << " (" << std::fixed;
    out.precision(1);
    out << r.seconds << "s): " << r.detail;
    return out.str();
}

}  // namespace ctlz::acceptance
