#pragma once

// CTL* with atomic constraints on finite constraint graphs. Paths are read
// through windows of d+1 consecutive nodes, so a constraint of depth <= d is
// a proposition of the window it starts at.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ctlz/buchi.hpp"
#include "ctlz/domain.hpp"
#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/model.hpp"
#include "ctlz/rewrite.hpp"

namespace ctlz {

inline constexpr std::size_t kMaxWindows = 50000;

struct WindowModel {
    int depth = 0;
    /// Node tuples (v0, ..., vd).
    std::vector<std::vector<int>> windows;
    std::vector<std::vector<int>> succ;

    [[nodiscard]] int size() const { return static_cast<int>(windows.size()); }
    [[nodiscard]] int first(int w) const { return windows.at(w).front(); }
};

/// All paths of d+1 nodes, in lexicographic order of node indices.
inline WindowModel expand_windows(const ConstraintKripke& c, int d) {
    if (c.shape() != ConstraintKripke::Shape::Graph) throw ModelError("window expansion requires a graph-shaped model");
    if (d < 0) throw ModelError("window depth must be nonnegative");
    c.validate(false);
    WindowModel m;
    m.depth = d;
    std::map<std::vector<int>, int> index;
    std::vector<int> cur;
    std::function<void(int)> grow = [&](int v) {
        cur.push_back(v);
        if (static_cast<int>(cur.size()) == d + 1) {
            if (m.windows.size() >= kMaxWindows)
                throw LimitError("window expansion exceeds " + std::to_string(kMaxWindows) + " windows");
            index.emplace(cur, static_cast<int>(m.windows.size()));
            m.windows.push_back(cur);
        } else {
            for (int u : c.successors(v)) grow(u);
        }
        cur.pop_back();
    };
    for (int v = 0; v < c.size(); ++v) grow(v);
    std::sort(m.windows.begin(), m.windows.end());
    for (int i = 0; i < m.size(); ++i) index[m.windows[i]] = i;
    m.succ.resize(m.windows.size());
    for (int i = 0; i < m.size(); ++i) {
        std::vector<int> next(m.windows[i].begin() + 1, m.windows[i].end());
        next.push_back(0);
        for (int u : c.successors(m.windows[i].back())) {
            next.back() = u;
            m.succ[i].push_back(index.at(next));
        }
        std::sort(m.succ[i].begin(), m.succ[i].end());
    }
    return m;
}

/// Truth of constraint `k` at window w.
inline bool window_constraint(const ConstraintKripke& c, const ConcreteDomain& dom, const WindowModel& m, int w,
                              const Constraint& k) {
    std::vector<Element> vals;
    vals.reserve(k.args.size());
    for (const auto& t : k.args) {
        if (t.offset > m.depth) throw ModelError("constraint deeper than the window expansion");
        vals.push_back(c.reg(m.windows[w][t.offset], c.var_index(t.var)));
    }
    return dom.eval(k.rel, vals);
}

/// Automata reused across checks of formulas with the same path subformulas.
struct ModelCheckCache {
    std::map<Formula, BuchiAutomaton> automata;
};

namespace detail {

using Bits = std::vector<char>;

/// Shared pieces of the CTL* checker and the CTL oracle.
class WindowContext {
public:
    WindowContext(const ConstraintKripke& c, const ConcreteDomain& dom, int d)
        : c_(c), dom_(dom), m_(expand_windows(c, d)) {}

    [[nodiscard]] const WindowModel& model() const { return m_; }
    [[nodiscard]] int size() const { return m_.size(); }

    Bits prop(const std::string& p) const {
        Bits out(size());
        for (int w = 0; w < size(); ++w) out[w] = c_.has_label(m_.first(w), p) ? 1 : 0;
        return out;
    }
    Bits atom(const Constraint& k) const {
        Bits out(size());
        for (int w = 0; w < size(); ++w) out[w] = window_constraint(c_, dom_, m_, w, k) ? 1 : 0;
        return out;
    }
    /// Window value = some (all) window with the same first node.
    Bits close(const Bits& b, bool universal) const {
        std::vector<char> node(c_.size(), universal ? 1 : 0);
        for (int w = 0; w < size(); ++w) {
            if (universal && !b[w]) node[m_.first(w)] = 0;
            if (!universal && b[w]) node[m_.first(w)] = 1;
        }
        Bits out(size());
        for (int w = 0; w < size(); ++w) out[w] = node[m_.first(w)];
        return out;
    }
    [[nodiscard]] std::vector<int> nodes_of(const Bits& b) const {
        std::vector<char> node(c_.size(), 0);
        for (int w = 0; w < size(); ++w)
            if (b[w]) node[m_.first(w)] = 1;
        std::vector<int> out;
        for (int v = 0; v < c_.size(); ++v)
            if (node[v]) out.push_back(v);
        return out;
    }

private:
    const ConstraintKripke& c_;
    const ConcreteDomain& dom_;
    WindowModel m_;
};

inline Bits negate_bits(Bits b) {
    for (auto& x : b) x = !x;
    return b;
}

inline Bits combine(const Bits& a, const Bits& b, bool conj) {
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = conj ? (a[i] && b[i]) : (a[i] || b[i]);
    return out;
}

class CtlStarChecker {
public:
    CtlStarChecker(const WindowContext& ctx, ModelCheckCache* cache) : ctx_(ctx), cache_(cache ? cache : &own_) {}

    Bits state(const Formula& f) {
        const auto it = memo_.find(f);
        if (it != memo_.end()) return it->second;
        Bits out;
        switch (f.op()) {
            case Op::True: out = Bits(ctx_.size(), 1); break;
            case Op::False: out = Bits(ctx_.size(), 0); break;
            case Op::Prop: out = ctx_.prop(f.prop_name()); break;
            case Op::Not: out = negate_bits(state(f.sub())); break;
            case Op::And:
            case Op::Or: out = combine(state(f.lhs()), state(f.rhs()), f.op() == Op::And); break;
            case Op::Exists: out = exists(f.sub()); break;
            case Op::All: out = negate_bits(exists(to_nnf(Formula::neg(f.sub())))); break;
            default: throw DomainError("expected a state formula");
        }
        memo_.emplace(f, out);
        return out;
    }

private:
    Bits exists(const Formula& psi) {
        std::map<Formula, int> leaf_ids;
        std::vector<Bits> leaves;
        std::function<Formula(const Formula&)> abstract = [&](const Formula& g) -> Formula {
            const bool leaf = g.op() == Op::Atom || (is_state_formula(g) && g.op() != Op::True && g.op() != Op::False);
            if (!leaf) return map_children(g, abstract);
            auto it = leaf_ids.find(g);
            if (it == leaf_ids.end()) {
                it = leaf_ids.emplace(g, static_cast<int>(leaves.size())).first;
                leaves.push_back(g.op() == Op::Atom ? ctx_.atom(g.constraint()) : state(g));
            }
            return Formula::prop("m" + std::to_string(it->second));
        };
        const Formula ltl = to_nnf(abstract(psi));
        auto ait = cache_->automata.find(ltl);
        if (ait == cache_->automata.end()) ait = cache_->automata.emplace(ltl, ltl_to_buchi(ltl)).first;
        const BuchiAutomaton& aut = ait->second;
        std::vector<std::vector<int>> pos(aut.size()), neg(aut.size());
        for (int q = 0; q < aut.size(); ++q) {
            for (const auto& p : aut.states[q].pos) pos[q].push_back(std::stoi(p.substr(1)));
            for (const auto& p : aut.states[q].neg) neg[q].push_back(std::stoi(p.substr(1)));
        }
        const Bits acc = accepting_starts(aut, ctx_.model().succ, [&](int q, int w) {
            for (int i : pos[q])
                if (!leaves[i][w]) return false;
            for (int i : neg[q])
                if (leaves[i][w]) return false;
            return true;
        });
        return ctx_.close(acc, false);
    }

    static Formula map_children(const Formula& g, const std::function<Formula(const Formula&)>& fn) {
        return detail::map_children(g, fn);
    }

    const WindowContext& ctx_;
    ModelCheckCache own_;
    ModelCheckCache* cache_;
    std::map<Formula, Bits> memo_;
};

/// EX/EU/ER and AX/AU/AR fixpoints on the window model.
class CtlOracle {
public:
    explicit CtlOracle(const WindowContext& ctx) : ctx_(ctx) {}

    Bits state(const Formula& f) {
        switch (f.op()) {
            case Op::True: return Bits(ctx_.size(), 1);
            case Op::False: return Bits(ctx_.size(), 0);
            case Op::Prop: return ctx_.prop(f.prop_name());
            case Op::Not: return negate_bits(state(f.sub()));
            case Op::And:
            case Op::Or: return combine(state(f.lhs()), state(f.rhs()), f.op() == Op::And);
            case Op::Exists:
            case Op::All: return quantified(f.sub(), f.op() == Op::All);
            default: throw DomainError("expected a state formula");
        }
    }

private:
    /// Boolean combination of state formulas and constraints.
    Bits local(const Formula& f) {
        switch (f.op()) {
            case Op::Atom: return ctx_.atom(f.constraint());
            case Op::Not: return negate_bits(local(f.sub()));
            case Op::And:
            case Op::Or: return combine(local(f.lhs()), local(f.rhs()), f.op() == Op::And);
            case Op::Next:
            case Op::Until:
            case Op::Release: throw DomainError("not a CTL formula: nested temporal operator");
            default: return state(f);
        }
    }

    Bits quantified(const Formula& psi, bool universal) {
        const auto& succ = ctx_.model().succ;
        const int n = ctx_.size();
        const auto step = [&](const Bits& z, int w) {
            bool any = false, all = true;
            for (int u : succ[w]) {
                any = any || z[u];
                all = all && z[u];
            }
            return universal ? all : any;
        };
        Bits out;
        switch (psi.op()) {
            case Op::Next: {
                const Bits a = local(psi.sub());
                out.assign(n, 0);
                for (int w = 0; w < n; ++w) out[w] = step(a, w);
                break;
            }
            case Op::Until:
            case Op::Release: {
                const Bits a = local(psi.lhs()), b = local(psi.rhs());
                const bool until = psi.op() == Op::Until;
                out.assign(n, until ? 0 : 1);
                for (bool changed = true; changed;) {
                    changed = false;
                    for (int w = 0; w < n; ++w) {
                        const bool v = until ? (b[w] || (a[w] && step(out, w))) : (b[w] && (a[w] || step(out, w)));
                        if (v != static_cast<bool>(out[w])) {
                            out[w] = v;
                            changed = true;
                        }
                    }
                }
                break;
            }
            default: out = local(psi); break;
        }
        return ctx_.close(out, universal);
    }

    const WindowContext& ctx_;
};

}  // namespace detail

/// Nodes of the graph C satisfying the state formula φ, in declaration order.
inline std::vector<int> check_ctlstar(const ConstraintKripke& c, const Formula& phi, const ConcreteDomain& dom,
                                      ModelCheckCache* cache = nullptr) {
    if (!is_state_formula(phi)) throw DomainError("model checking expects a state formula");
    for (const auto& k : constraints_of(phi)) dom.check_symbol(k.rel);
    const detail::WindowContext ctx(c, dom, max_constraint_depth(phi));
    detail::CtlStarChecker checker(ctx, cache);
    return ctx.nodes_of(checker.state(phi));
}

/// Fixpoint evaluation for formulas whose temporal operators sit directly
/// under E or A; throws DomainError on other inputs.
inline std::vector<int> check_ctl_oracle(const ConstraintKripke& c, const Formula& phi, const ConcreteDomain& dom) {
    if (!is_state_formula(phi)) throw DomainError("model checking expects a state formula");
    for (const auto& k : constraints_of(phi)) dom.check_symbol(k.rel);
    const detail::WindowContext ctx(c, dom, max_constraint_depth(phi));
    detail::CtlOracle oracle(ctx);
    return ctx.nodes_of(oracle.state(to_nnf(phi)));
}

}  // namespace ctlz
