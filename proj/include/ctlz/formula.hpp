#pragma once

// Formula AST for CTL* with atomic constraints.
//
// State and path formulas share one node type. A node is a state formula
// when it is a proposition, a boolean combination of state formulas, or
// starts with a path quantifier; see is_state_formula().

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ctlz/error.hpp"
#include "ctlz/rational.hpp"

namespace ctlz {

enum class RelKind { Less, Equal, Constant, Modulo, Interpreted };

/// Relation symbol of a concrete-domain signature.
///
/// Built-in kinds carry their parameters: `Constant` is =_c (unary),
/// `Modulo` is the congruence x = residue (mod modulus) (unary).
/// `Interpreted` symbols are named relations of derived domains
/// (Allen relations, lexicographic order) with an explicit arity.
struct RelationSymbol {
    RelKind kind = RelKind::Less;
    Rational constant;
    std::int64_t residue = 0;
    std::int64_t modulus = 0;
    std::string name;
    int arity = 2;

    static RelationSymbol less() { return {RelKind::Less, {}, 0, 0, {}, 2}; }
    static RelationSymbol equal() { return {RelKind::Equal, {}, 0, 0, {}, 2}; }
    static RelationSymbol constant_eq(Rational c) { return {RelKind::Constant, c, 0, 0, {}, 1}; }
    static RelationSymbol modulo(std::int64_t a, std::int64_t b) {
        if (b < 2 || a < 0 || a >= b)
            throw DomainError("malformed modulo parameters mod[" + std::to_string(a) + "," + std::to_string(b) +
                              "]: need 0 <= a < b and b >= 2");
        return {RelKind::Modulo, {}, a, b, {}, 1};
    }
    static RelationSymbol interpreted(std::string name, int arity) {
        return {RelKind::Interpreted, {}, 0, 0, std::move(name), arity};
    }

    /// Concrete syntax: "lt", "eq", "eqc[5]", "mod[1,2]", or the interpreted name.
    [[nodiscard]] std::string token() const {
        switch (kind) {
            case RelKind::Less: return "lt";
            case RelKind::Equal: return "eq";
            case RelKind::Constant: return "eqc[" + constant.str() + "]";
            case RelKind::Modulo: return "mod[" + std::to_string(residue) + "," + std::to_string(modulus) + "]";
            case RelKind::Interpreted: return name;
        }
        return {};
    }

    friend bool operator==(const RelationSymbol&, const RelationSymbol&) = default;
    friend std::strong_ordering operator<=>(const RelationSymbol& a, const RelationSymbol& b) {
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        if (auto c = a.constant <=> b.constant; c != 0) return c;
        if (auto c = a.residue <=> b.residue; c != 0) return c;
        if (auto c = a.modulus <=> b.modulus; c != 0) return c;
        if (auto c = a.name <=> b.name; c != 0) return c;
        return a.arity <=> b.arity;
    }
};

/// X^offset var: the value of `var` `offset` steps ahead on the path.
struct Term {
    int offset = 0;
    std::string var;

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

/// r(X^{i1} x1, ..., X^{ik} xk).
struct Constraint {
    RelationSymbol rel;
    std::vector<Term> args;

    [[nodiscard]] int depth() const {
        int d = 0;
        for (const auto& t : args) d = std::max(d, t.offset);
        return d;
    }

    friend bool operator==(const Constraint&, const Constraint&) = default;
    friend std::strong_ordering operator<=>(const Constraint& a, const Constraint& b) {
        if (auto c = a.rel <=> b.rel; c != 0) return c;
        return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
    }
};

enum class Op { True, False, Prop, Not, And, Or, Exists, All, Next, Until, Release, Atom };

namespace detail {
struct FormulaNode;
}

/// Immutable formula handle with value semantics; subtrees are shared.
class Formula {
public:
    Formula() : Formula(top()) {}

    static Formula top();
    static Formula bottom();
    static Formula prop(std::string name);
    static Formula atom(Constraint c);
    static Formula neg(Formula f);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula exists(Formula f);
    static Formula all(Formula f);
    static Formula next(Formula f);
    static Formula until(Formula a, Formula b);
    static Formula release(Formula a, Formula b);

    /// Left-nested conjunction/disjunction; empty lists give true/false.
    static Formula conj_all(const std::vector<Formula>& fs);
    static Formula disj_all(const std::vector<Formula>& fs);
    /// X^k f.
    static Formula next_n(int k, Formula f);

    [[nodiscard]] Op op() const;
    [[nodiscard]] const std::string& prop_name() const;
    [[nodiscard]] const Constraint& constraint() const;
    [[nodiscard]] const Formula& lhs() const;
    [[nodiscard]] const Formula& rhs() const;
    /// Operand of unary nodes.
    [[nodiscard]] const Formula& sub() const { return lhs(); }

    [[nodiscard]] bool is_unary() const {
        const Op o = op();
        return o == Op::Not || o == Op::Exists || o == Op::All || o == Op::Next;
    }
    [[nodiscard]] bool is_binary() const {
        const Op o = op();
        return o == Op::And || o == Op::Or || o == Op::Until || o == Op::Release;
    }

    friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);
    friend bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

private:
    explicit Formula(std::shared_ptr<const detail::FormulaNode> n) : node_(std::move(n)) {}
    static Formula make(Op op, std::string prop, Constraint c, std::vector<Formula> kids);

    std::shared_ptr<const detail::FormulaNode> node_;
};

namespace detail {
struct FormulaNode {
    Op op = Op::True;
    std::string prop;
    Constraint constraint;
    std::vector<Formula> kids;
};
}  // namespace detail

inline Formula Formula::make(Op op, std::string prop, Constraint c, std::vector<Formula> kids) {
    return Formula(std::make_shared<const detail::FormulaNode>(
        detail::FormulaNode{op, std::move(prop), std::move(c), std::move(kids)}));
}

inline Formula Formula::top() {
    static const Formula t = make(Op::True, {}, {}, {});
    return t;
}
inline Formula Formula::bottom() {
    static const Formula f = make(Op::False, {}, {}, {});
    return f;
}
inline Formula Formula::prop(std::string name) { return make(Op::Prop, std::move(name), {}, {}); }
inline Formula Formula::atom(Constraint c) {
    if (static_cast<int>(c.args.size()) != c.rel.arity)
        throw DomainError("constraint " + c.rel.token() + " expects " + std::to_string(c.rel.arity) +
                          " argument(s), got " + std::to_string(c.args.size()));
    return make(Op::Atom, {}, std::move(c), {});
}
inline Formula Formula::neg(Formula f) { return make(Op::Not, {}, {}, {std::move(f)}); }
inline Formula Formula::conj(Formula a, Formula b) { return make(Op::And, {}, {}, {std::move(a), std::move(b)}); }
inline Formula Formula::disj(Formula a, Formula b) { return make(Op::Or, {}, {}, {std::move(a), std::move(b)}); }
inline Formula Formula::exists(Formula f) { return make(Op::Exists, {}, {}, {std::move(f)}); }
inline Formula Formula::all(Formula f) { return make(Op::All, {}, {}, {std::move(f)}); }
inline Formula Formula::next(Formula f) { return make(Op::Next, {}, {}, {std::move(f)}); }
inline Formula Formula::until(Formula a, Formula b) { return make(Op::Until, {}, {}, {std::move(a), std::move(b)}); }
inline Formula Formula::release(Formula a, Formula b) {
    return make(Op::Release, {}, {}, {std::move(a), std::move(b)});
}

inline Formula Formula::conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return top();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
}
inline Formula Formula::disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return bottom();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
}
inline Formula Formula::next_n(int k, Formula f) {
    for (int i = 0; i < k; ++i) f = next(std::move(f));
    return f;
}

inline Op Formula::op() const { return node_->op; }
inline const std::string& Formula::prop_name() const { return node_->prop; }
inline const Constraint& Formula::constraint() const { return node_->constraint; }
inline const Formula& Formula::lhs() const { return node_->kids.at(0); }
inline const Formula& Formula::rhs() const { return node_->kids.at(1); }

inline std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.op() <=> b.op(); c != 0) return c;
    switch (a.op()) {
        case Op::True:
        case Op::False: return std::strong_ordering::equal;
        case Op::Prop: return a.prop_name() <=> b.prop_name();
        case Op::Atom: return a.constraint() <=> b.constraint();
        default: break;
    }
    const auto& ka = a.node_->kids;
    const auto& kb = b.node_->kids;
    for (std::size_t i = 0; i < ka.size() && i < kb.size(); ++i)
        if (auto c = ka[i] <=> kb[i]; c != 0) return c;
    return ka.size() <=> kb.size();
}

// ---------------------------------------------------------------------------
// Queries

/// Proposition, boolean combination of state formulas, or E/A formula.
inline bool is_state_formula(const Formula& f) {
    switch (f.op()) {
        case Op::True:
        case Op::False:
        case Op::Prop:
        case Op::Exists:
        case Op::All: return true;
        case Op::Not: return is_state_formula(f.sub());
        case Op::And:
        case Op::Or: return is_state_formula(f.lhs()) && is_state_formula(f.rhs());
        default: return false;
    }
}

/// Negation only directly above propositions or constraints.
inline bool is_nnf(const Formula& f) {
    switch (f.op()) {
        case Op::Not: return f.sub().op() == Op::Prop || f.sub().op() == Op::Atom;
        case Op::True:
        case Op::False:
        case Op::Prop:
        case Op::Atom: return true;
        case Op::Exists:
        case Op::All:
        case Op::Next: return is_nnf(f.sub());
        default: return is_nnf(f.lhs()) && is_nnf(f.rhs());
    }
}

/// NNF without negated constraints.
inline bool is_snnf(const Formula& f) {
    switch (f.op()) {
        case Op::Not: return f.sub().op() == Op::Prop;
        case Op::True:
        case Op::False:
        case Op::Prop:
        case Op::Atom: return true;
        case Op::Exists:
        case Op::All:
        case Op::Next: return is_snnf(f.sub());
        default: return is_snnf(f.lhs()) && is_snnf(f.rhs());
    }
}

template <class Fn>
void visit_preorder(const Formula& f, Fn&& fn) {
    fn(f);
    switch (f.op()) {
        case Op::True:
        case Op::False:
        case Op::Prop:
        case Op::Atom: return;
        default: break;
    }
    visit_preorder(f.lhs(), fn);
    if (f.is_binary()) visit_preorder(f.rhs(), fn);
}

/// Variables in order of first occurrence.
inline std::vector<std::string> variables_of(const Formula& f) {
    std::vector<std::string> out;
    visit_preorder(f, [&](const Formula& g) {
        if (g.op() != Op::Atom) return;
        for (const auto& t : g.constraint().args)
            if (std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
    });
    return out;
}

/// Propositions in order of first occurrence.
inline std::vector<std::string> propositions_of(const Formula& f) {
    std::vector<std::string> out;
    visit_preorder(f, [&](const Formula& g) {
        if (g.op() == Op::Prop && std::find(out.begin(), out.end(), g.prop_name()) == out.end())
            out.push_back(g.prop_name());
    });
    return out;
}

/// Distinct constraints in order of first occurrence (pre-order, left to right).
inline std::vector<Constraint> constraints_of(const Formula& f) {
    std::vector<Constraint> out;
    visit_preorder(f, [&](const Formula& g) {
        if (g.op() == Op::Atom && std::find(out.begin(), out.end(), g.constraint()) == out.end())
            out.push_back(g.constraint());
    });
    return out;
}

/// Relation symbols used by constraints, sorted.
inline std::set<RelationSymbol> relations_of(const Formula& f) {
    std::set<RelationSymbol> out;
    visit_preorder(f, [&](const Formula& g) {
        if (g.op() == Op::Atom) out.insert(g.constraint().rel);
    });
    return out;
}

inline int max_constraint_depth(const Formula& f) {
    int d = 0;
    visit_preorder(f, [&](const Formula& g) {
        if (g.op() == Op::Atom) d = std::max(d, g.constraint().depth());
    });
    return d;
}

/// Reserved identifiers start with a double underscore and are produced only by rewriters.
inline bool is_reserved_identifier(const std::string& s) { return s.size() >= 2 && s[0] == '_' && s[1] == '_'; }

}  // namespace ctlz
