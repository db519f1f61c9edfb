#pragma once

// Propositional LTL to generalized Büchi automata (tableau construction),
// emptiness of the product with a finite graph, and direct evaluation on
// ultimately periodic words.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"

namespace ctlz {

/// A state reads the current letter: it requires every proposition in `pos`
/// and none in `neg`. Letters are valuations of `props`.
struct BuchiState {
    std::set<std::string> pos;
    std::set<std::string> neg;
    std::vector<int> next;
    bool initial = false;
};

struct BuchiAutomaton {
    std::vector<std::string> props;
    std::vector<BuchiState> states;
    /// One accepting set per Until subformula, in `untils` order.
    std::vector<std::vector<int>> acceptance;
    std::vector<Formula> untils;

    [[nodiscard]] int size() const { return static_cast<int>(states.size()); }

    [[nodiscard]] bool reads(int q, const std::set<std::string>& letter) const {
        const auto& s = states.at(q);
        for (const auto& p : s.pos)
            if (!letter.count(p)) return false;
        for (const auto& p : s.neg)
            if (letter.count(p)) return false;
        return true;
    }
};

namespace detail {

inline void require_propositional_nnf(const Formula& f) {
    switch (f.op()) {
        case Op::True:
        case Op::False:
        case Op::Prop: return;
        case Op::Not:
            if (f.sub().op() != Op::Prop) throw DomainError("LTL input must be in negation normal form");
            return;
        case Op::Next: require_propositional_nnf(f.sub()); return;
        case Op::And:
        case Op::Or:
        case Op::Until:
        case Op::Release:
            require_propositional_nnf(f.lhs());
            require_propositional_nnf(f.rhs());
            return;
        case Op::Atom: throw DomainError("LTL input contains a constraint");
        case Op::Exists:
        case Op::All: throw DomainError("LTL input contains a path quantifier");
    }
}

}  // namespace detail

/// Tableau translation of an NNF formula over propositions, with X, U and R.
inline BuchiAutomaton ltl_to_buchi(const Formula& psi) {
    detail::require_propositional_nnf(psi);
    struct Node {
        std::set<int> in;
        std::set<Formula> todo, old, next;
    };
    constexpr int kInit = -1;
    std::vector<Node> closed;
    std::vector<Node> work;
    work.push_back({{kInit}, {psi}, {}, {}});
    const auto add = [](Node& n, const Formula& g) {
        if (!n.old.count(g)) n.todo.insert(g);
    };
    while (!work.empty()) {
        Node n = std::move(work.back());
        work.pop_back();
        if (n.todo.empty()) {
            const auto it = std::find_if(closed.begin(), closed.end(),
                                         [&](const Node& c) { return c.old == n.old && c.next == n.next; });
            if (it != closed.end()) {
                it->in.insert(n.in.begin(), n.in.end());
                continue;
            }
            const int id = static_cast<int>(closed.size());
            closed.push_back(n);
            work.push_back({{id}, n.next, {}, {}});
            continue;
        }
        const Formula eta = *n.todo.begin();
        n.todo.erase(n.todo.begin());
        if (n.old.count(eta)) {
            work.push_back(std::move(n));
            continue;
        }
        switch (eta.op()) {
            case Op::False: break;
            case Op::True:
                n.old.insert(eta);
                work.push_back(std::move(n));
                break;
            case Op::Prop:
            case Op::Not: {
                const Formula dual = eta.op() == Op::Prop ? Formula::neg(eta) : eta.sub();
                if (n.old.count(dual)) break;
                n.old.insert(eta);
                work.push_back(std::move(n));
                break;
            }
            case Op::And:
                add(n, eta.lhs());
                add(n, eta.rhs());
                n.old.insert(eta);
                work.push_back(std::move(n));
                break;
            case Op::Next:
                n.next.insert(eta.sub());
                n.old.insert(eta);
                work.push_back(std::move(n));
                break;
            case Op::Or:
            case Op::Until:
            case Op::Release: {
                Node a = n, b = std::move(n);
                a.old.insert(eta);
                b.old.insert(eta);
                if (eta.op() == Op::Or) {
                    add(a, eta.lhs());
                    add(b, eta.rhs());
                } else if (eta.op() == Op::Until) {
                    add(a, eta.lhs());
                    a.next.insert(eta);
                    add(b, eta.rhs());
                } else {
                    add(a, eta.rhs());
                    a.next.insert(eta);
                    add(b, eta.lhs());
                    add(b, eta.rhs());
                }
                work.push_back(std::move(b));
                work.push_back(std::move(a));
                break;
            }
            default: throw DomainError("unexpected operator in LTL tableau");
        }
    }

    BuchiAutomaton aut;
    std::set<std::string> props;
    visit_preorder(psi, [&](const Formula& g) {
        if (g.op() == Op::Prop) props.insert(g.prop_name());
        if (g.op() == Op::Until && std::find(aut.untils.begin(), aut.untils.end(), g) == aut.untils.end())
            aut.untils.push_back(g);
    });
    aut.props.assign(props.begin(), props.end());
    aut.states.resize(closed.size());
    for (std::size_t q = 0; q < closed.size(); ++q) {
        auto& s = aut.states[q];
        for (const auto& g : closed[q].old) {
            if (g.op() == Op::Prop) s.pos.insert(g.prop_name());
            if (g.op() == Op::Not) s.neg.insert(g.sub().prop_name());
        }
        for (int from : closed[q].in) {
            if (from == kInit)
                s.initial = true;
            else
                aut.states[from].next.push_back(static_cast<int>(q));
        }
    }
    for (const auto& u : aut.untils) {
        std::vector<int> acc;
        for (std::size_t q = 0; q < closed.size(); ++q)
            if (!closed[q].old.count(u) || closed[q].old.count(u.rhs())) acc.push_back(static_cast<int>(q));
        aut.acceptance.push_back(std::move(acc));
    }
    for (auto& s : aut.states) std::sort(s.next.begin(), s.next.end());
    return aut;
}

/// Vertices of a finite graph from which some infinite path is accepted by
/// `aut`. `reads(q, w)` tells whether vertex w satisfies the letter
/// constraint of state q.
template <class Reads>
std::vector<char> accepting_starts(const BuchiAutomaton& aut, const std::vector<std::vector<int>>& succ, Reads&& reads) {
    const int nw = static_cast<int>(succ.size());
    const int nq = aut.size();
    const long long total = static_cast<long long>(nw) * nq;
    std::vector<char> valid(static_cast<std::size_t>(total), 0);
    for (int w = 0; w < nw; ++w)
        for (int q = 0; q < nq; ++q) valid[static_cast<std::size_t>(w) * nq + q] = reads(q, w) ? 1 : 0;
    const auto id = [&](int w, int q) { return static_cast<long long>(w) * nq + q; };
    const auto for_succ = [&](long long v, auto&& fn) {
        const int w = static_cast<int>(v / nq), q = static_cast<int>(v % nq);
        for (int w2 : succ[w])
            for (int q2 : aut.states[q].next)
                if (valid[id(w2, q2)]) fn(id(w2, q2));
    };

    // Tarjan's algorithm, iterative.
    std::vector<int> index(static_cast<std::size_t>(total), -1), low(static_cast<std::size_t>(total), 0);
    std::vector<int> comp(static_cast<std::size_t>(total), -1);
    std::vector<char> on_stack(static_cast<std::size_t>(total), 0);
    std::vector<long long> stack;
    std::vector<std::vector<long long>> members;
    int counter = 0;
    struct Frame {
        long long v;
        std::vector<long long> out;
        std::size_t pos;
    };
    for (long long root = 0; root < total; ++root) {
        if (!valid[root] || index[root] >= 0) continue;
        std::vector<Frame> call;
        const auto enter = [&](long long v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = 1;
            Frame f{v, {}, 0};
            for_succ(v, [&](long long u) { f.out.push_back(u); });
            call.push_back(std::move(f));
        };
        enter(root);
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.pos < f.out.size()) {
                const long long u = f.out[f.pos++];
                if (index[u] < 0)
                    enter(u);
                else if (on_stack[u])
                    low[f.v] = std::min(low[f.v], index[u]);
                continue;
            }
            const long long v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                const int c = static_cast<int>(members.size());
                members.emplace_back();
                long long u;
                do {
                    u = stack.back();
                    stack.pop_back();
                    on_stack[u] = 0;
                    comp[u] = c;
                    members.back().push_back(u);
                } while (u != v);
            }
        }
    }

    std::vector<std::vector<char>> in_acc(aut.acceptance.size(), std::vector<char>(nq, 0));
    for (std::size_t i = 0; i < aut.acceptance.size(); ++i)
        for (int q : aut.acceptance[i]) in_acc[i][q] = 1;
    std::vector<char> good(static_cast<std::size_t>(total), 0);
    std::vector<long long> queue;
    for (const auto& m : members) {
        bool nontrivial = m.size() > 1;
        if (!nontrivial)
            for_succ(m[0], [&](long long u) {
                if (u == m[0]) nontrivial = true;
            });
        if (!nontrivial) continue;
        bool all_sets = true;
        for (const auto& acc : in_acc) {
            const bool hit = std::any_of(m.begin(), m.end(), [&](long long v) { return acc[v % nq] != 0; });
            if (!hit) {
                all_sets = false;
                break;
            }
        }
        if (!all_sets) continue;
        for (long long v : m) {
            good[v] = 1;
            queue.push_back(v);
        }
    }

    std::vector<std::vector<long long>> pred(static_cast<std::size_t>(total));
    for (long long v = 0; v < total; ++v)
        if (valid[v]) for_succ(v, [&](long long u) { pred[u].push_back(v); });
    while (!queue.empty()) {
        const long long v = queue.back();
        queue.pop_back();
        for (long long u : pred[v])
            if (!good[u]) {
                good[u] = 1;
                queue.push_back(u);
            }
    }

    std::vector<char> out(nw, 0);
    for (int w = 0; w < nw; ++w)
        for (int q = 0; q < nq; ++q)
            if (aut.states[q].initial && good[id(w, q)]) out[w] = 1;
    return out;
}

/// Truth of a propositional LTL formula at every position of the
/// word u v^ω, where `letters` holds u followed by v and `loop_start` = |u|.
inline std::vector<char> eval_ltl_lasso(const Formula& f, const std::vector<std::set<std::string>>& letters,
                                        int loop_start) {
    const int n = static_cast<int>(letters.size());
    if (n == 0 || loop_start < 0 || loop_start >= n) throw ModelError("malformed lasso");
    const auto step = [&](int i) { return i + 1 < n ? i + 1 : loop_start; };
    switch (f.op()) {
        case Op::True: return std::vector<char>(n, 1);
        case Op::False: return std::vector<char>(n, 0);
        case Op::Prop: {
            std::vector<char> out(n);
            for (int i = 0; i < n; ++i) out[i] = letters[i].count(f.prop_name()) ? 1 : 0;
            return out;
        }
        case Op::Not: {
            auto out = eval_ltl_lasso(f.sub(), letters, loop_start);
            for (auto& c : out) c = !c;
            return out;
        }
        case Op::Next: {
            const auto a = eval_ltl_lasso(f.sub(), letters, loop_start);
            std::vector<char> out(n);
            for (int i = 0; i < n; ++i) out[i] = a[step(i)];
            return out;
        }
        case Op::And:
        case Op::Or: {
            const auto a = eval_ltl_lasso(f.lhs(), letters, loop_start);
            const auto b = eval_ltl_lasso(f.rhs(), letters, loop_start);
            std::vector<char> out(n);
            for (int i = 0; i < n; ++i) out[i] = f.op() == Op::And ? (a[i] && b[i]) : (a[i] || b[i]);
            return out;
        }
        case Op::Until:
        case Op::Release: {
            const auto a = eval_ltl_lasso(f.lhs(), letters, loop_start);
            const auto b = eval_ltl_lasso(f.rhs(), letters, loop_start);
            const bool until = f.op() == Op::Until;
            std::vector<char> out(n, until ? 0 : 1);
            for (bool changed = true; changed;) {
                changed = false;
                for (int i = n - 1; i >= 0; --i) {
                    const char v = until ? (b[i] || (a[i] && out[step(i)])) : (b[i] && (a[i] || out[step(i)]));
                    if (v != out[i]) {
                        out[i] = v;
                        changed = true;
                    }
                }
            }
            return out;
        }
        default: throw DomainError("lasso evaluation expects a propositional LTL formula");
    }
}

/// Whether `aut` accepts the lasso word u v^ω.
inline bool buchi_accepts_lasso(const BuchiAutomaton& aut, const std::vector<std::set<std::string>>& letters,
                                int loop_start) {
    const int n = static_cast<int>(letters.size());
    if (n == 0 || loop_start < 0 || loop_start >= n) throw ModelError("malformed lasso");
    std::vector<std::vector<int>> succ(n);
    for (int i = 0; i < n; ++i) succ[i] = {i + 1 < n ? i + 1 : loop_start};
    return accepting_starts(aut, succ, [&](int q, int w) { return aut.reads(q, letters[w]); })[0] != 0;
}

}  // namespace ctlz
