#pragma once

// Bounded model search (sound, incomplete) and the consistency harness for
// the abstraction/homomorphism reduction on finite trees.
//
// Candidate order: node count, then edge bitmask (bit u*k+v is the edge
// u -> v), then label bitmask (bit v*|P|+i puts the i-th proposition at v),
// then register assignments in lexicographic order of (node, variable) slots
// over ascending candidate values.

#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctlz/domain.hpp"
#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/homcheck.hpp"
#include "ctlz/model.hpp"
#include "ctlz/modelcheck.hpp"
#include "ctlz/rewrite.hpp"

namespace ctlz {

struct SatModel {
    ConstraintKripke model;
    int node = 0;
};

struct SatStats {
    std::int64_t graphs = 0;
    std::int64_t assignments = 0;
    std::int64_t checks = 0;
};

/// Scalar register candidates: 0, ±r, each constant c with c±1, the value of
/// least magnitude in every residue class modulo the lcm of the moduli, and
/// ±1. With `full_sweep`, every integer in [-r, r].
inline std::vector<Rational> register_candidates(const Formula& phi, int range, bool full_sweep) {
    std::set<Rational> out;
    const auto in_range = [&](const Rational& v) { return Rational(-range) <= v && v <= Rational(range); };
    const auto put = [&](const Rational& v) {
        if (in_range(v)) out.insert(v);
    };
    if (full_sweep) {
        for (int v = -range; v <= range; ++v) out.insert(Rational(v));
        for (const auto& r : relations_of(phi))
            if (r.kind == RelKind::Constant && !r.constant.is_integer()) put(r.constant);
        return {out.begin(), out.end()};
    }
    for (int v : {0, -1, 1, -range, range}) put(Rational(v));
    std::int64_t lcm = 1;
    for (const auto& r : relations_of(phi)) {
        if (r.kind == RelKind::Constant) {
            put(r.constant);
            put(r.constant - Rational(1));
            put(r.constant + Rational(1));
        }
        if (r.kind == RelKind::Modulo) lcm = std::min<std::int64_t>(std::lcm(lcm, r.modulus), 2 * range + 1);
    }
    for (std::int64_t a = 0; a < lcm; ++a) {
        std::optional<std::int64_t> best;
        for (std::int64_t v = -range; v <= range; ++v)
            if (((v % lcm) + lcm) % lcm == a && (!best || std::abs(v) < std::abs(*best))) best = v;
        if (best) put(Rational(*best));
    }
    return {out.begin(), out.end()};
}

/// Sorted candidates plus the midpoint of each adjacent pair, for dense domains.
inline std::vector<Rational> with_midpoints(const std::vector<Rational>& sorted) {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0) out.push_back((sorted[i - 1] + sorted[i]) / Rational(2));
        out.push_back(sorted[i]);
    }
    return out;
}

/// Domain elements built from the scalar candidates, in lexicographic order.
inline std::vector<Element> element_candidates(const ConcreteDomain& dom, const std::vector<Rational>& scalars) {
    std::vector<Element> out;
    Element cur;
    std::function<void()> grow = [&]() {
        if (static_cast<int>(cur.size()) == dom.width()) {
            if (dom.contains(cur)) out.push_back(cur);
            return;
        }
        for (const auto& s : scalars) {
            cur.push_back(s);
            grow();
            cur.pop_back();
        }
    };
    grow();
    return out;
}

/// First model in candidate order whose node satisfies φ; the result is
/// re-verified with check_ctlstar. No result is not evidence of
/// unsatisfiability.
inline std::optional<SatModel> find_model(const Formula& phi, const ConcreteDomain& dom, int max_nodes, int range,
                                          bool full_sweep = false, SatStats* stats = nullptr) {
    if (max_nodes < 1) throw std::invalid_argument("find_model needs at least one node");
    if (range < 0) throw std::invalid_argument("find_model needs a nonnegative register range");
    if (max_nodes > 4) throw LimitError("find_model supports at most 4 nodes");
    if (!is_state_formula(phi)) throw DomainError("satisfiability search expects a state formula");
    for (const auto& k : constraints_of(phi)) dom.check_symbol(k.rel);
    SatStats local;
    SatStats& st = stats ? *stats : local;

    const auto vars = variables_of(phi);
    const auto props = propositions_of(phi);
    const auto constraints = constraints_of(phi);
    const int d = max_constraint_depth(phi);
    auto scalars = register_candidates(phi, range, full_sweep);
    if (dom.kind() == ConcreteDomain::Kind::Q) scalars = with_midpoints(scalars);
    const auto values = element_candidates(dom, scalars);
    const int nv = static_cast<int>(vars.size()), np = static_cast<int>(props.size());
    if (nv > 0 && values.empty()) return std::nullopt;
    ModelCheckCache cache;

    for (int k = 1; k <= max_nodes; ++k) {
        if (k * np > 20) throw LimitError("too many label bits for the search");
        const std::uint64_t edge_masks = std::uint64_t{1} << (k * k);
        for (std::uint64_t em = 0; em < edge_masks; ++em) {
            bool total = true;
            for (int u = 0; u < k && total; ++u) total = ((em >> (u * k)) & ((std::uint64_t{1} << k) - 1)) != 0;
            if (!total) continue;
            ++st.graphs;
            ConstraintKripke c(vars);
            for (int v = 0; v < k; ++v) c.add_node("n" + std::to_string(v));
            for (int u = 0; u < k; ++u)
                for (int v = 0; v < k; ++v)
                    if ((em >> (u * k + v)) & 1) c.add_edge(u, v);
            const int slots = k * nv;

            for (std::uint64_t lm = 0; lm < (std::uint64_t{1} << (k * np)); ++lm) {
                ConstraintKripke labeled(vars);
                for (int v = 0; v < k; ++v) labeled.add_node(c.node(v));
                for (int u = 0; u < k; ++u)
                    for (int v : c.successors(u)) labeled.add_edge(u, v);
                for (int v = 0; v < k; ++v)
                    for (int i = 0; i < np; ++i)
                        if ((lm >> (v * np + i)) & 1) labeled.add_label(v, props[i]);
                const detail::WindowContext lctx(labeled, dom, d);
                const WindowModel& wm = lctx.model();

                std::unordered_set<std::string> seen;
                std::vector<int> idx(slots, 0);
                for (bool more = true; more;) {
                    ++st.assignments;
                    for (int s = 0; s < slots; ++s) labeled.set_register(s / nv, s % nv, values[idx[s]]);
                    std::string sig;
                    sig.reserve(constraints.size() * wm.windows.size());
                    for (const auto& con : constraints)
                        for (int w = 0; w < wm.size(); ++w)
                            sig.push_back(window_constraint(labeled, dom, wm, w, con) ? '1' : '0');
                    if (seen.insert(sig).second) {
                        ++st.checks;
                        detail::CtlStarChecker checker(lctx, &cache);
                        const auto nodes = lctx.nodes_of(checker.state(phi));
                        if (!nodes.empty()) {
                            const auto again = check_ctlstar(labeled, phi, dom);
                            if (std::find(again.begin(), again.end(), nodes.front()) == again.end())
                                throw std::logic_error("search result failed re-verification");
                            return SatModel{labeled, nodes.front()};
                        }
                    }
                    more = false;
                    for (int s = slots - 1; s >= 0; --s) {
                        if (++idx[s] < static_cast<int>(values.size())) {
                            more = true;
                            break;
                        }
                        idx[s] = 0;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reduction harness on finite trees

namespace detail {

/// Checks the harness fragment: boolean combinations of E/A over X-only path
/// formulas, no nested path quantifiers. Returns the lookahead, the largest
/// number of X steps plus constraint depth over all leaves.
inline int bounded_lookahead(const Formula& f, bool under_quantifier, int xs) {
    switch (f.op()) {
        case Op::True:
        case Op::False:
        case Op::Prop: return xs;
        case Op::Atom: return xs + f.constraint().depth();
        case Op::Until:
        case Op::Release: throw DomainError("reduction harness allows only X and boolean path operators");
        case Op::Exists:
        case Op::All:
            if (under_quantifier) throw DomainError("reduction harness allows path quantifiers only at the top level");
            return bounded_lookahead(f.sub(), true, xs);
        case Op::Next: return bounded_lookahead(f.sub(), under_quantifier, xs + 1);
        case Op::Not: return bounded_lookahead(f.sub(), under_quantifier, xs);
        default:
            return std::max(bounded_lookahead(f.lhs(), under_quantifier, xs),
                            bounded_lookahead(f.rhs(), under_quantifier, xs));
    }
}

class TreeEvaluator {
public:
    TreeEvaluator(const ConstraintKripke& t, const ConcreteDomain& dom) : t_(t), dom_(dom) {}

    bool state(const Formula& f, int v) {
        switch (f.op()) {
            case Op::True: return true;
            case Op::False: return false;
            case Op::Prop: return t_.has_label(v, f.prop_name());
            case Op::Not: return !state(f.sub(), v);
            case Op::And: return state(f.lhs(), v) && state(f.rhs(), v);
            case Op::Or: return state(f.lhs(), v) || state(f.rhs(), v);
            case Op::Exists:
            case Op::All: {
                const bool universal = f.op() == Op::All;
                std::vector<int> path{v};
                return paths(f.sub(), path, universal);
            }
            default: throw DomainError("expected a state formula");
        }
    }

private:
    bool paths(const Formula& psi, std::vector<int>& path, bool universal) {
        const auto& next = t_.successors(path.back());
        if (next.empty()) return path_holds(psi, path, 0);
        for (int u : next) {
            path.push_back(u);
            const bool r = paths(psi, path, universal);
            path.pop_back();
            if (r != universal) return r;
        }
        return universal;
    }

    bool path_holds(const Formula& f, const std::vector<int>& path, std::size_t i) {
        switch (f.op()) {
            case Op::Atom: {
                const Constraint& c = f.constraint();
                std::vector<Element> vals;
                for (const auto& term : c.args) {
                    const std::size_t j = i + static_cast<std::size_t>(term.offset);
                    if (j >= path.size()) throw ModelError("constraint looks beyond the tree");
                    vals.push_back(t_.reg(path[j], t_.var_index(term.var)));
                }
                return dom_.eval(c.rel, vals);
            }
            case Op::Next:
                if (i + 1 >= path.size()) throw ModelError("X steps beyond the tree");
                return path_holds(f.sub(), path, i + 1);
            case Op::Not: return !path_holds(f.sub(), path, i);
            case Op::And: return path_holds(f.lhs(), path, i) && path_holds(f.rhs(), path, i);
            case Op::Or: return path_holds(f.lhs(), path, i) || path_holds(f.rhs(), path, i);
            default: return state(f, path[i]);
        }
    }

    const ConstraintKripke& t_;
    const ConcreteDomain& dom_;
};

inline Target target_for(const ConcreteDomain& dom) {
    switch (dom.kind()) {
        case ConcreteDomain::Kind::Z: return Target::Z;
        case ConcreteDomain::Kind::N: return Target::N;
        case ConcreteDomain::Kind::NegZ: return Target::NegZ;
        case ConcreteDomain::Kind::Q: return Target::Q;
        default: break;
    }
    throw DomainError("reduction harness needs a numeric domain, got " + dom.name());
}

}  // namespace detail

/// Truth of φ at the root of a finite tree, for formulas accepted by the
/// reduction harness.
inline bool eval_tree_root(const ConstraintKripke& t, const Formula& phi, const ConcreteDomain& dom) {
    detail::require_tree(t);
    if (detail::bounded_lookahead(phi, false, 0) > t.depth())
        throw ModelError("tree depth " + std::to_string(t.depth()) + " is below the formula's lookahead");
    detail::TreeEvaluator ev(t, dom);
    return ev.state(phi, t.node_of_word(""));
}

struct ReductionReport {
    /// (C, root) satisfies φ.
    bool premise = false;
    /// Labelings with (T, root) ⊨ φ^a and a homomorphism G_T -> domain.
    int backward_cases = 0;
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Checks both directions of the reduction on the tree C. Backward cases use
/// C^a plus `labelings` random labelings of the abstraction propositions.
inline ReductionReport reduction_consistency(const ConstraintKripke& c, const Formula& phi, const ConcreteDomain& dom,
                                             int labelings = 4, std::uint64_t seed = 0) {
    detail::require_tree(c);
    if (!is_state_formula(phi)) throw DomainError("reduction harness expects a state formula");
    if (!is_snnf(phi)) throw DomainError("reduction harness expects a formula in strong negation normal form");
    const int look = detail::bounded_lookahead(phi, false, 0);
    if (look > c.depth())
        throw ModelError("tree depth " + std::to_string(c.depth()) + " is below the formula lookahead " +
                         std::to_string(look));
    const Target target = detail::target_for(dom);
    const auto abs = abstract_constraints(phi);
    const auto& vars = c.vars();
    const int nv = static_cast<int>(vars.size());
    ReductionReport rep;

    rep.premise = eval_tree_root(c, phi, dom);
    const ConstraintKripke ca = abstract_model(c, abs.table, dom);
    if (rep.premise) {
        if (!eval_tree_root(ca, abs.formula, dom)) rep.violations.push_back("forward: C^a does not satisfy the abstraction");
        const SigmaStructure g = extract_constraint_graph(ca, abs.table, vars);
        for (const auto& [rel, tuples] : g.relations())
            for (const auto& tup : tuples) {
                std::vector<Element> vals;
                for (int e : tup) vals.push_back(c.reg(e / nv, e % nv));
                if (!dom.eval(rel, vals)) rep.violations.push_back("forward: registers violate " + rel.token() + " in G_T");
            }
    }

    std::mt19937_64 rng(seed);
    for (int trial = 0; trial <= labelings; ++trial) {
        ConstraintKripke t = c;
        if (trial == 0) {
            t = ca;
        } else {
            ConstraintKripke fresh = ConstraintKripke::tree(c.branching(), c.depth(), vars);
            for (int v = 0; v < c.size(); ++v) {
                for (const auto& p : c.labels(v)) fresh.add_label(v, p);
                const int len = static_cast<int>(c.word(v).size());
                for (const auto& e : abs.table)
                    if (len >= e.depth && (rng() & 1)) fresh.add_label(v, e.prop);
            }
            t = fresh;
        }
        if (!eval_tree_root(t, abs.formula, dom)) continue;
        const SigmaStructure g = extract_constraint_graph(t, abs.table, vars);
        const HomDecision h = decide_hom(g, target);
        if (!h.yes) continue;
        ++rep.backward_cases;
        ConstraintKripke model = t;
        for (int v = 0; v < t.size(); ++v)
            for (int x = 0; x < nv; ++x) model.set_register(v, x, Element{h.witness->at(v * nv + x)});
        if (!eval_tree_root(model, phi, dom))
            rep.violations.push_back("backward: labeling " + std::to_string(trial) +
                                     " has a homomorphism but the induced model fails the formula");
    }
    return rep;
}

}  // namespace ctlz
