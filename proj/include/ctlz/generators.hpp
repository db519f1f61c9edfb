#pragma once

// Seeded random structures, models and formulas for differential testing.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctlz/domain.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/model.hpp"
#include "ctlz/structure.hpp"

namespace ctlz::gen {

using Rng = std::mt19937_64;

/// {<, =, =_0, =_2, ≡_{0,2}, ≡_{1,2}, ≡_{1,3}}.
inline const std::vector<RelationSymbol>& sigma0() {
    static const std::vector<RelationSymbol> s = {
        RelationSymbol::less(),          RelationSymbol::equal(),         RelationSymbol::constant_eq(Rational(0)),
        RelationSymbol::constant_eq(Rational(2)), RelationSymbol::modulo(0, 2), RelationSymbol::modulo(1, 2),
        RelationSymbol::modulo(1, 3)};
    return s;
}

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// σ₀-structure on n elements e0..e{n-1} whose relation bits are read from
/// `bits`: n² bits for <, n² for =, then n per unary symbol.
inline SigmaStructure sigma0_structure_from_bits(int n, std::uint64_t bits) {
    SigmaStructure a;
    for (int i = 0; i < n; ++i) a.add_element("e" + std::to_string(i));
    for (const auto& r : sigma0()) a.declare(r);
    int b = 0;
    const auto take = [&]() { return (bits >> b++) & 1; };
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (take()) a.add(sigma0()[k], {i, j});
    for (std::size_t k = 2; k < sigma0().size(); ++k)
        for (int i = 0; i < n; ++i)
            if (take()) a.add(sigma0()[k], {i});
    return a;
}

inline int sigma0_bit_count(int n) { return 2 * n * n + 5 * n; }

/// Random σ₀-structure with sparse order edges so that both verdicts occur.
inline SigmaStructure random_sigma0_structure(Rng& rng, int n) {
    SigmaStructure a;
    for (int i = 0; i < n; ++i) a.add_element("e" + std::to_string(i));
    for (const auto& r : sigma0()) a.declare(r);
    const double p_lt = 1.0 / (n + 1), p_eq = 0.3 / (n + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (chance(rng, p_lt)) a.add(RelationSymbol::less(), {i, j});
            if (chance(rng, p_eq)) a.add(RelationSymbol::equal(), {i, j});
        }
    for (int i = 0; i < n; ++i)
        for (std::size_t k = 2; k < sigma0().size(); ++k)
            if (chance(rng, 0.12)) a.add(sigma0()[k], {i});
    return a;
}

/// Graph with 1..max_nodes nodes, out-degree 1..3, random labels and
/// integer registers in [-range, range].
inline ConstraintKripke random_graph(Rng& rng, int max_nodes, const std::vector<std::string>& vars,
                                     const std::vector<std::string>& props, int range) {
    const int n = uniform(rng, 1, max_nodes);
    ConstraintKripke c(vars);
    for (int v = 0; v < n; ++v) c.add_node("v" + std::to_string(v));
    for (int v = 0; v < n; ++v) {
        const int deg = uniform(rng, 1, std::min(3, n));
        for (int k = 0; k < deg; ++k) c.add_edge(v, uniform(rng, 0, n - 1));
        for (const auto& p : props)
            if (chance(rng, 0.5)) c.add_label(v, p);
        for (std::size_t x = 0; x < vars.size(); ++x)
            c.set_register(v, static_cast<int>(x), Element{Rational(uniform(rng, -range, range))});
    }
    return c;
}

/// Full tree with random integer registers in [-range, range].
inline ConstraintKripke random_tree(Rng& rng, int branching, int depth, const std::vector<std::string>& vars,
                                    int range) {
    ConstraintKripke t = ConstraintKripke::tree(branching, depth, vars);
    for (int v = 0; v < t.size(); ++v)
        for (std::size_t x = 0; x < vars.size(); ++x)
            t.set_register(v, static_cast<int>(x), Element{Rational(uniform(rng, -range, range))});
    return t;
}

/// σ₀ constraint over `vars` with offsets in [0, max_depth].
inline Constraint random_sigma0_constraint(Rng& rng, const std::vector<std::string>& vars, int max_depth) {
    const auto term = [&]() {
        return Term{uniform(rng, 0, max_depth), vars[uniform(rng, 0, static_cast<int>(vars.size()) - 1)]};
    };
    const auto& rel = sigma0()[uniform(rng, 0, static_cast<int>(sigma0().size()) - 1)];
    Constraint c{rel, {}};
    for (int i = 0; i < rel.arity; ++i) c.args.push_back(term());
    return c;
}

struct FormulaShape {
    std::vector<std::string> props = {"p", "q"};
    std::vector<std::string> vars = {"x"};
    int max_depth = 4;
    /// Largest X offset inside constraints; negative disables constraints.
    int constraint_depth = 1;
};

namespace detail {

inline Formula random_leaf(Rng& rng, const FormulaShape& s, bool allow_atoms) {
    const int k = uniform(rng, 0, allow_atoms && s.constraint_depth >= 0 ? 5 : 3);
    if (k == 0) return chance(rng, 0.5) ? Formula::top() : Formula::bottom();
    if (k <= 2 || !allow_atoms || s.constraint_depth < 0) {
        Formula p = Formula::prop(s.props[uniform(rng, 0, static_cast<int>(s.props.size()) - 1)]);
        return chance(rng, 0.3) ? Formula::neg(p) : p;
    }
    return Formula::atom(random_sigma0_constraint(rng, s.vars, s.constraint_depth));
}

/// Boolean combination of state formulas and constraints.
inline Formula random_local(Rng& rng, const FormulaShape& s, int depth);

inline Formula random_ctl_state(Rng& rng, const FormulaShape& s, int depth) {
    if (depth <= 0) return random_leaf(rng, s, false);
    switch (uniform(rng, 0, 5)) {
        case 0: return random_leaf(rng, s, false);
        case 1: return Formula::neg(random_ctl_state(rng, s, depth - 1));
        case 2: return Formula::conj(random_ctl_state(rng, s, depth - 1), random_ctl_state(rng, s, depth - 1));
        case 3: return Formula::disj(random_ctl_state(rng, s, depth - 1), random_ctl_state(rng, s, depth - 1));
        default: {
            const auto a = [&]() { return random_local(rng, s, depth - 1); };
            Formula path;
            switch (uniform(rng, 0, 3)) {
                case 0: path = Formula::next(a()); break;
                case 1: path = Formula::until(a(), a()); break;
                case 2: path = Formula::release(a(), a()); break;
                default: path = a(); break;
            }
            return chance(rng, 0.5) ? Formula::exists(path) : Formula::all(path);
        }
    }
}

inline Formula random_local(Rng& rng, const FormulaShape& s, int depth) {
    if (depth <= 0) return random_leaf(rng, s, true);
    switch (uniform(rng, 0, 4)) {
        case 0: return random_leaf(rng, s, true);
        case 1: return Formula::conj(random_local(rng, s, depth - 1), random_local(rng, s, depth - 1));
        case 2: return Formula::disj(random_local(rng, s, depth - 1), random_local(rng, s, depth - 1));
        case 3: return Formula::neg(random_leaf(rng, s, true));
        default: return random_ctl_state(rng, s, depth - 1);
    }
}

inline Formula random_path(Rng& rng, const FormulaShape& s, int depth, bool allow_quantifiers) {
    if (depth <= 0) return random_leaf(rng, s, true);
    const auto sub = [&]() { return random_path(rng, s, depth - 1, allow_quantifiers); };
    switch (uniform(rng, 0, allow_quantifiers ? 7 : 6)) {
        case 0: return random_leaf(rng, s, true);
        case 1: return Formula::neg(sub());
        case 2: return Formula::conj(sub(), sub());
        case 3: return Formula::disj(sub(), sub());
        case 4: return Formula::next(sub());
        case 5: return Formula::until(sub(), sub());
        case 6: return Formula::release(sub(), sub());
        default: return chance(rng, 0.5) ? Formula::exists(sub()) : Formula::all(sub());
    }
}

}  // namespace detail

/// State formula whose temporal operators sit directly under E or A.
inline Formula random_ctl_formula(Rng& rng, const FormulaShape& s) {
    return detail::random_ctl_state(rng, s, s.max_depth);
}

/// Arbitrary path formula, possibly with nested path quantifiers.
inline Formula random_path_formula(Rng& rng, const FormulaShape& s, bool allow_quantifiers = true) {
    return detail::random_path(rng, s, s.max_depth, allow_quantifiers);
}

/// Boolean combination of E/A over X-only, negation-free-on-constraints path
/// formulas whose lookahead stays within `depth`.
inline Formula random_x_formula(Rng& rng, const std::vector<std::string>& vars, const std::vector<std::string>& props,
                                int depth) {
    std::function<Formula(int, int)> path = [&](int budget, int size) -> Formula {
        if (size <= 0 || chance(rng, 0.3)) {
            if (!props.empty() && chance(rng, 0.25)) {
                Formula p = Formula::prop(props[uniform(rng, 0, static_cast<int>(props.size()) - 1)]);
                return chance(rng, 0.3) ? Formula::neg(p) : p;
            }
            return Formula::atom(random_sigma0_constraint(rng, vars, budget));
        }
        switch (uniform(rng, 0, 2)) {
            case 0: return Formula::conj(path(budget, size - 1), path(budget, size - 1));
            case 1: return Formula::disj(path(budget, size - 1), path(budget, size - 1));
            default:
                if (budget == 0) return path(budget, size - 1);
                return Formula::next(path(budget - 1, size - 1));
        }
    };
    const auto quantified = [&]() {
        Formula p = path(depth, 3);
        return chance(rng, 0.5) ? Formula::exists(p) : Formula::all(p);
    };
    switch (uniform(rng, 0, 2)) {
        case 0: return Formula::conj(quantified(), quantified());
        case 1: return Formula::disj(quantified(), quantified());
        default: return quantified();
    }
}

}  // namespace ctlz::gen
