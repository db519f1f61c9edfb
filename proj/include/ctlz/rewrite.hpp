#pragma once

// Formula rewriters: negation normal form, strong negation normal form over a
// concrete domain, E-subformula counting, constraint abstraction and the
// rewriting induced by an existential interpretation.

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ctlz/domain.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/parser.hpp"

namespace ctlz {

namespace detail {

inline Formula nnf(const Formula& f, bool negate) {
    switch (f.op()) {
        case Op::True: return negate ? Formula::bottom() : f;
        case Op::False: return negate ? Formula::top() : f;
        case Op::Prop:
        case Op::Atom: return negate ? Formula::neg(f) : f;
        case Op::Not: return nnf(f.sub(), !negate);
        case Op::And: {
            Formula a = nnf(f.lhs(), negate), b = nnf(f.rhs(), negate);
            return negate ? Formula::disj(a, b) : Formula::conj(a, b);
        }
        case Op::Or: {
            Formula a = nnf(f.lhs(), negate), b = nnf(f.rhs(), negate);
            return negate ? Formula::conj(a, b) : Formula::disj(a, b);
        }
        case Op::Exists: return negate ? Formula::all(nnf(f.sub(), true)) : Formula::exists(nnf(f.sub(), false));
        case Op::All: return negate ? Formula::exists(nnf(f.sub(), true)) : Formula::all(nnf(f.sub(), false));
        case Op::Next: return Formula::next(nnf(f.sub(), negate));
        case Op::Until: {
            Formula a = nnf(f.lhs(), negate), b = nnf(f.rhs(), negate);
            return negate ? Formula::release(a, b) : Formula::until(a, b);
        }
        case Op::Release: {
            Formula a = nnf(f.lhs(), negate), b = nnf(f.rhs(), negate);
            return negate ? Formula::until(a, b) : Formula::release(a, b);
        }
    }
    return f;
}

/// Rebuilds `f` with `fn` applied to every direct child.
template <class Fn>
Formula map_children(const Formula& f, Fn&& fn) {
    switch (f.op()) {
        case Op::True:
        case Op::False:
        case Op::Prop:
        case Op::Atom: return f;
        case Op::Not: return Formula::neg(fn(f.sub()));
        case Op::Exists: return Formula::exists(fn(f.sub()));
        case Op::All: return Formula::all(fn(f.sub()));
        case Op::Next: return Formula::next(fn(f.sub()));
        case Op::And: return Formula::conj(fn(f.lhs()), fn(f.rhs()));
        case Op::Or: return Formula::disj(fn(f.lhs()), fn(f.rhs()));
        case Op::Until: return Formula::until(fn(f.lhs()), fn(f.rhs()));
        case Op::Release: return Formula::release(fn(f.lhs()), fn(f.rhs()));
    }
    return f;
}

/// Instantiates a positive formula, mapping each slot to a term.
inline Formula instantiate(const PosFormula& p, const std::function<Term(const Slot&)>& term_for) {
    switch (p.kind) {
        case PosFormula::Kind::True: return Formula::top();
        case PosFormula::Kind::False: return Formula::bottom();
        case PosFormula::Kind::And:
        case PosFormula::Kind::Or: {
            std::vector<Formula> kids;
            for (const auto& k : p.kids) kids.push_back(instantiate(k, term_for));
            return p.kind == PosFormula::Kind::And ? Formula::conj_all(kids) : Formula::disj_all(kids);
        }
        case PosFormula::Kind::Atom: break;
    }
    std::vector<Term> args;
    for (const auto& s : p.args) args.push_back(term_for(s));
    return Formula::atom(Constraint{p.rel, std::move(args)});
}

}  // namespace detail

/// Negation normal form over {∧, ∨, E, A, X, U, R}; ¬ only above propositions and constraints.
inline Formula to_nnf(const Formula& f) { return detail::nnf(f, false); }

/// Strong negation normal form: every ¬R is replaced by the domain's positive
/// definition of the complement. Fresh variables `__y<k>` are allocated per
/// distinct negated constraint and placed at offset depth(R).
inline Formula to_snnf(const Formula& f, const ConcreteDomain& dom) {
    const Formula n = to_nnf(f);
    std::map<Constraint, std::vector<Term>> fresh_for;
    int counter = 0;
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (g.op() == Op::Atom) {
            dom.check_symbol(g.constraint().rel);
            return g;
        }
        if (g.op() == Op::Not && g.sub().op() == Op::Atom) {
            const Constraint& c = g.sub().constraint();
            const NegationEntry entry = dom.negation(c.rel);
            auto it = fresh_for.find(c);
            if (it == fresh_for.end()) {
                std::vector<Term> fresh;
                for (int j = 0; j < entry.fresh_count; ++j)
                    fresh.push_back(Term{c.depth(), "__y" + std::to_string(counter++)});
                it = fresh_for.emplace(c, std::move(fresh)).first;
            }
            const auto& fresh = it->second;
            return detail::instantiate(entry.body, [&](const Slot& sl) {
                if (sl.component >= 0) throw DomainError("component slot in a negation entry");
                return sl.fresh ? fresh.at(sl.index) : c.args.at(sl.index);
            });
        }
        return detail::map_children(g, go);
    };
    return go(n);
}

struct ECount {
    int e_count = 0;
    int d = 1;
};

/// Number of distinct E-subformulas after NNF and the branching bound d = e + 1.
/// With `a_as_e`, every A ψ is counted as E nnf(¬ψ).
inline ECount count_e(const Formula& f, bool a_as_e = true) {
    std::vector<Formula> seen;
    std::function<void(const Formula&)> go = [&](const Formula& g) {
        if (g.op() == Op::Exists || (a_as_e && g.op() == Op::All)) {
            const Formula key = g.op() == Op::Exists ? g : Formula::exists(to_nnf(Formula::neg(g.sub())));
            if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
        }
        switch (g.op()) {
            case Op::True:
            case Op::False:
            case Op::Prop:
            case Op::Atom: return;
            default: break;
        }
        go(g.lhs());
        if (g.is_binary()) go(g.rhs());
    };
    go(to_nnf(f));
    const int e = static_cast<int>(seen.size());
    return {e, e + 1};
}

// ---------------------------------------------------------------------------
// Abstraction

struct AbstractionEntry {
    Constraint constraint;
    std::string prop;
    int depth = 0;
};

using AbstractionTable = std::vector<AbstractionEntry>;

/// Builds the table for the distinct constraints of `f` in first-occurrence
/// order, naming propositions `<prefix><i>` starting at `first_index`.
inline AbstractionTable make_abstraction_table(const Formula& f, const std::string& prefix = "__p", int first_index = 0) {
    AbstractionTable table;
    int i = first_index;
    for (const auto& c : constraints_of(f)) table.push_back({c, prefix + std::to_string(i++), c.depth()});
    return table;
}

/// Replaces every constraint R_i by X^{d_i} p_i using `table`.
inline Formula abstract_with(const Formula& f, const AbstractionTable& table) {
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (g.op() == Op::Atom) {
            for (const auto& e : table)
                if (e.constraint == g.constraint()) return Formula::next_n(e.depth, Formula::prop(e.prop));
            throw DomainError("constraint " + to_string(g) + " missing from abstraction table");
        }
        return detail::map_children(g, go);
    };
    return go(f);
}

struct Abstraction {
    Formula formula;
    AbstractionTable table;
};

/// φ^a together with its table. `f` should be in SNNF; negated constraints are
/// abstracted as negated X^{d} p, which is only meaningful for NNF input.
inline Abstraction abstract_constraints(const Formula& f) {
    AbstractionTable table = make_abstraction_table(f);
    return {abstract_with(f, table), std::move(table)};
}

/// Inverse of abstract_with: X^{d_i} p_i becomes R_i again.
inline Formula concretize(const Formula& f, const AbstractionTable& table) {
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (g.op() == Op::Next || g.op() == Op::Prop) {
            int k = 0;
            Formula inner = g;
            while (inner.op() == Op::Next) {
                inner = inner.sub();
                ++k;
            }
            if (inner.op() == Op::Prop) {
                for (const auto& e : table)
                    if (e.prop == inner.prop_name() && e.depth <= k)
                        return Formula::next_n(k - e.depth, Formula::atom(e.constraint));
                return g;
            }
        }
        return detail::map_children(g, go);
    };
    return go(f);
}

// ---------------------------------------------------------------------------
// Existential interpretations

/// Name of component c (0-based) of a tuple variable.
inline std::string component_var(const std::string& var, int c) { return var + "_" + std::to_string(c + 1); }

/// θ = ψ' ∧ A G ⋀_x φ(y_x, x_1..x_n), where ψ' replaces every constraint by
/// the interpretation's formula over component variables. The A G conjunct is
/// omitted when the domain formula is total.
inline Formula apply_interpretation(const ExistentialInterpretation& in, const Formula& f) {
    const auto constraints = constraints_of(f);
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (g.op() != Op::Atom) return detail::map_children(g, go);
        const Constraint& c = g.constraint();
        const auto it = in.relations.find(c.rel.token());
        if (it == in.relations.end()) throw DomainError("interpretation has no formula for relation " + c.rel.token());
        if (it->second.arity != static_cast<int>(c.args.size()))
            throw DomainError("arity mismatch for interpreted relation " + c.rel.token());
        const int idx = static_cast<int>(std::find(constraints.begin(), constraints.end(), c) - constraints.begin());
        std::vector<Term> fresh;
        for (int q = 0; q < it->second.fresh; ++q)
            fresh.push_back(Term{c.depth(), "__z_" + std::to_string(idx) + "_" + std::to_string(q + 1)});
        return detail::instantiate(it->second.formula, [&](const Slot& sl) {
            if (sl.fresh) return fresh.at(sl.index);
            const Term& t = c.args.at(sl.index);
            return Term{t.offset, component_var(t.var, sl.component < 0 ? 0 : sl.component)};
        });
    };
    Formula body = go(f);
    if (in.domain_total) return body;
    std::vector<Formula> per_var;
    for (const auto& x : variables_of(f)) {
        std::vector<Term> fresh;
        for (int j = 0; j < in.domain_fresh; ++j) fresh.push_back(Term{0, "__y_" + x + "_" + std::to_string(j + 1)});
        per_var.push_back(detail::instantiate(in.domain_formula, [&](const Slot& sl) {
            return sl.fresh ? fresh.at(sl.index) : Term{0, component_var(x, sl.component < 0 ? 0 : sl.component)};
        }));
    }
    if (per_var.empty()) return body;
    return Formula::conj(body, Formula::all(Formula::release(Formula::bottom(), Formula::conj_all(per_var))));
}

}  // namespace ctlz
