#pragma once

// Homomorphism existence from finite structures into Z, N, Z\N and Q, with
// witness synthesis, an independent verifier and a brute-force oracle.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctlz/domain.hpp"
#include "ctlz/error.hpp"
#include "ctlz/rational.hpp"
#include "ctlz/structure.hpp"

namespace ctlz {

enum class Target { Z, N, NegZ, Q };

inline Target parse_target(const std::string& s) {
    if (s == "Z") return Target::Z;
    if (s == "N") return Target::N;
    if (s == "negZ") return Target::NegZ;
    if (s == "Q") return Target::Q;
    throw DomainError("unknown target '" + s + "' (expected Z, N, negZ or Q)");
}

inline std::string target_name(Target t) {
    switch (t) {
        case Target::Z: return "Z";
        case Target::N: return "N";
        case Target::NegZ: return "negZ";
        case Target::Q: return "Q";
    }
    return {};
}

using ModPair = std::pair<std::int64_t, std::int64_t>;  // (residue, modulus)

/// ∼-quotient. Classes are numbered by their least member.
struct QuotientStructure {
    std::vector<int> class_of;
    std::vector<std::vector<int>> members;
    std::vector<std::set<int>> succ;
    std::vector<std::set<int>> pred;
    std::vector<std::set<Rational>> constants;
    std::vector<std::set<ModPair>> modulos;

    [[nodiscard]] int size() const { return static_cast<int>(members.size()); }
};

struct HomReason {
    enum class Kind { Cycle, ModuloContradiction, BoundedInfeasible, ConstantClash, OrderConstantConflict };
    Kind kind = Kind::Cycle;
    std::vector<int> classes;  // quotient classes: the cycle in order, or the offending class(es)
    ModPair mod1{}, mod2{};
    Rational c1, c2;
    int elem_a = -1, elem_b = -1;
};

inline std::string reason_name(HomReason::Kind k) {
    switch (k) {
        case HomReason::Kind::Cycle: return "cycle";
        case HomReason::Kind::ModuloContradiction: return "modulo_contradiction";
        case HomReason::Kind::BoundedInfeasible: return "bounded_infeasible";
        case HomReason::Kind::ConstantClash: return "constant_clash";
        case HomReason::Kind::OrderConstantConflict: return "order_constant_conflict";
    }
    return {};
}

struct HomDecision {
    bool yes = false;
    std::optional<std::vector<Rational>> witness;
    std::optional<HomReason> reason;
    QuotientStructure quotient;
};

// ---------------------------------------------------------------------------
// Quotient

/// Class index per element for the equivalence closure of I(=).
inline std::vector<int> sim_closure(const SigmaStructure& a) {
    const int n = a.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& t : a.tuples(RelationSymbol::equal())) {
        int x = find(t[0]), y = find(t[1]);
        if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
    std::vector<int> cls(n, -1);
    std::map<int, int> id;
    for (int e = 0; e < n; ++e) {
        const int r = find(e);
        auto it = id.find(r);
        if (it == id.end()) it = id.emplace(r, static_cast<int>(id.size())).first;
        cls[e] = it->second;
    }
    return cls;
}

inline QuotientStructure build_quotient(const SigmaStructure& a) {
    QuotientStructure q;
    q.class_of = sim_closure(a);
    const int k = a.size() == 0 ? 0 : *std::max_element(q.class_of.begin(), q.class_of.end()) + 1;
    q.members.resize(k);
    q.succ.resize(k);
    q.pred.resize(k);
    q.constants.resize(k);
    q.modulos.resize(k);
    for (int e = 0; e < a.size(); ++e) q.members[q.class_of[e]].push_back(e);
    for (const auto& [r, ts] : a.relations()) {
        for (const auto& t : ts) {
            switch (r.kind) {
                case RelKind::Less:
                    q.succ[q.class_of[t[0]]].insert(q.class_of[t[1]]);
                    q.pred[q.class_of[t[1]]].insert(q.class_of[t[0]]);
                    break;
                case RelKind::Constant: q.constants[q.class_of[t[0]]].insert(r.constant); break;
                case RelKind::Modulo: q.modulos[q.class_of[t[0]]].insert({r.residue, r.modulus}); break;
                default: break;
            }
        }
    }
    return q;
}

/// A class cycle of E_< (a self-loop counts), found by depth-first search.
inline std::optional<std::vector<int>> check_cycle(const QuotientStructure& q) {
    const int k = q.size();
    std::vector<int> color(k, 0), stack;
    std::optional<std::vector<int>> found;
    std::function<bool(int)> dfs = [&](int c) {
        color[c] = 1;
        stack.push_back(c);
        for (int d : q.succ[c]) {
            if (color[d] == 1) {
                const auto it = std::find(stack.begin(), stack.end(), d);
                found = std::vector<int>(it, stack.end());
                return true;
            }
            if (color[d] == 0 && dfs(d)) return true;
        }
        stack.pop_back();
        color[c] = 2;
        return false;
    };
    for (int c = 0; c < k; ++c)
        if (color[c] == 0 && dfs(c)) return found;
    return std::nullopt;
}

namespace detail {

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

/// Merges x ≡ a1 (mod m1) with x ≡ a2 (mod m2); nullopt when incompatible.
inline std::optional<ModPair> crt_merge(ModPair x, ModPair y) {
    auto [a1, m1] = x;
    auto [a2, m2] = y;
    const std::int64_t g = gcd64(m1, m2);
    if ((a2 - a1) % g != 0) return std::nullopt;
    // Solve m1 * t ≡ a2 - a1 (mod m2).
    const __int128 m2g = m2 / g;
    __int128 inv = 0;
    {
        __int128 r0 = (m1 / g) % m2g, r1 = m2g, s0 = 1, s1 = 0;
        if (m2g == 1) {
            inv = 0;
        } else {
            while (r1 != 0) {
                const __int128 qq = r0 / r1;
                std::swap(r0, r1);
                r1 -= qq * r0;
                std::swap(s0, s1);
                s1 -= qq * s0;
            }
            inv = ((s0 % m2g) + m2g) % m2g;
        }
    }
    __int128 t = (static_cast<__int128>((a2 - a1) / g) % m2g) * inv % m2g;
    if (t < 0) t += m2g;
    const __int128 lcm = static_cast<__int128>(m1) / g * m2;
    if (lcm > INT64_MAX) throw std::overflow_error("modulus product too large");
    __int128 r = (a1 + static_cast<__int128>(m1) * t) % lcm;
    if (r < 0) r += lcm;
    return ModPair{static_cast<std::int64_t>(r), static_cast<std::int64_t>(lcm)};
}

/// Least nonnegative solution of a compatible congruence system (0 if empty).
inline std::int64_t least_solution(const std::set<ModPair>& sys) {
    ModPair acc{0, 1};
    for (const auto& p : sys) {
        const auto m = crt_merge(acc, p);
        if (!m) throw std::logic_error("least_solution on a contradictory system");
        acc = *m;
    }
    return acc.first;
}

/// Kahn order of `cls` (a subset of classes), smallest index first.
inline std::vector<int> topo_order(const QuotientStructure& q, const std::vector<char>& in) {
    const int k = q.size();
    std::vector<int> indeg(k, 0);
    for (int c = 0; c < k; ++c)
        if (in[c])
            for (int d : q.succ[c])
                if (in[d] && d != c) ++indeg[d];
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int c = 0; c < k; ++c)
        if (in[c] && indeg[c] == 0) ready.push(c);
    std::vector<int> order;
    while (!ready.empty()) {
        const int c = ready.top();
        ready.pop();
        order.push_back(c);
        for (int d : q.succ[c])
            if (in[d] && d != c && --indeg[d] == 0) ready.push(d);
    }
    return order;
}

/// Longest E_< path inside `in` ending at (forward) or starting from each class.
inline std::vector<std::int64_t> longest_paths(const QuotientStructure& q, const std::vector<char>& in, bool ending_at) {
    auto order = topo_order(q, in);
    std::vector<std::int64_t> len(q.size(), 0);
    if (!ending_at) std::reverse(order.begin(), order.end());
    for (int c : order) {
        const auto& nb = ending_at ? q.pred[c] : q.succ[c];
        for (int d : nb)
            if (in[d]) len[c] = std::max(len[c], len[d] + 1);
    }
    return len;
}

}  // namespace detail

struct ModuloConflict {
    int cls;
    ModPair first, second;
};

/// First class carrying two congruences with gcd(b,b') ∤ (a−a').
inline std::optional<ModuloConflict> check_modulo_contradiction(const QuotientStructure& q) {
    for (int c = 0; c < q.size(); ++c) {
        const std::vector<ModPair> ms(q.modulos[c].begin(), q.modulos[c].end());
        for (std::size_t i = 0; i < ms.size(); ++i)
            for (std::size_t j = i + 1; j < ms.size(); ++j)
                if ((ms[i].first - ms[j].first) % detail::gcd64(ms[i].second, ms[j].second) != 0)
                    return ModuloConflict{c, ms[i], ms[j]};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Bounded / greater / smaller / rest

enum class Part { B, G, S, R };

struct PartitionBGSR {
    std::vector<Part> part;  // per element
    [[nodiscard]] std::vector<int> elements(Part p) const {
        std::vector<int> out;
        for (int e = 0; e < static_cast<int>(part.size()); ++e)
            if (part[e] == p) out.push_back(e);
        return out;
    }
};

/// B: between two constant-labelled elements under ≤* (≤ = < ∪ = ∪ =⁻¹);
/// G: above some constant but not B; S: below; R: the rest.
inline PartitionBGSR partition_bgsr(const SigmaStructure& a) {
    const int n = a.size();
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (const auto& [r, ts] : a.relations()) {
        for (const auto& t : ts) {
            if (r.kind == RelKind::Less) {
                fwd[t[0]].push_back(t[1]);
                bwd[t[1]].push_back(t[0]);
            } else if (r.kind == RelKind::Equal) {
                fwd[t[0]].push_back(t[1]);
                fwd[t[1]].push_back(t[0]);
                bwd[t[0]].push_back(t[1]);
                bwd[t[1]].push_back(t[0]);
            }
        }
    }
    std::vector<char> is_const(n, 0);
    for (const auto& [r, ts] : a.relations())
        if (r.kind == RelKind::Constant)
            for (const auto& t : ts) is_const[t[0]] = 1;
    const auto bfs = [&](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(is_const);
        std::vector<int> work;
        for (int e = 0; e < n; ++e)
            if (seen[e]) work.push_back(e);
        while (!work.empty()) {
            const int e = work.back();
            work.pop_back();
            for (int f : adj[e])
                if (!seen[f]) {
                    seen[f] = 1;
                    work.push_back(f);
                }
        }
        return seen;
    };
    const auto above = bfs(fwd), below = bfs(bwd);
    PartitionBGSR p;
    p.part.resize(n);
    for (int e = 0; e < n; ++e) {
        if (above[e] && below[e])
            p.part[e] = Part::B;
        else if (above[e])
            p.part[e] = Part::G;
        else if (below[e])
            p.part[e] = Part::S;
        else
            p.part[e] = Part::R;
    }
    return p;
}

struct BoundedSolution {
    bool feasible = true;
    int stuck_class = -1;
    std::map<int, std::int64_t> value;  // per quotient class inside B
};

/// Greedy least assignment of B's classes in topological order within [m, M].
inline BoundedSolution solve_bounded(const QuotientStructure& q, const std::vector<char>& in_b, std::int64_t m,
                                     std::int64_t big_m) {
    BoundedSolution out;
    for (int c : detail::topo_order(q, in_b)) {
        std::int64_t lo = m;
        for (int p : q.pred[c])
            if (in_b[p]) lo = std::max(lo, out.value.at(p) + 1);
        std::optional<std::int64_t> chosen;
        const auto fits = [&](std::int64_t v) {
            for (const auto& [ra, mb] : q.modulos[c])
                if (floor_mod(v, mb) != ra) return false;
            return true;
        };
        if (!q.constants[c].empty()) {
            const Rational k = *q.constants[c].begin();
            if (k.is_integer() && k.num() >= lo && k.num() <= big_m && fits(k.num())) chosen = k.num();
        } else {
            for (std::int64_t v = lo; v <= big_m; ++v)
                if (fits(v)) {
                    chosen = v;
                    break;
                }
        }
        if (!chosen) {
            out.feasible = false;
            out.stuck_class = c;
            return out;
        }
        out.value[c] = *chosen;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Signature parameters

struct SignatureParams {
    std::set<Rational> constants;
    std::set<std::int64_t> moduli;
    std::int64_t m = 0, big_m = 0;
    std::int64_t delta = 1;
};

/// C, D, m ≤ 0 ≤ M and δ = ∏ D for the declared signature of `a`.
inline SignatureParams signature_params(const SigmaStructure& a) {
    SignatureParams p;
    for (const auto& r : a.signature()) {
        if (r.kind == RelKind::Constant) p.constants.insert(r.constant);
        if (r.kind == RelKind::Modulo) p.moduli.insert(r.modulus);
    }
    for (const auto& c : p.constants) {
        if (!c.is_integer()) continue;
        p.m = std::min(p.m, c.num());
        p.big_m = std::max(p.big_m, c.num());
    }
    for (auto b : p.moduli) {
        if (p.delta > INT64_MAX / b) throw std::overflow_error("modulus product too large");
        p.delta *= b;
    }
    return p;
}

/// Witness range bound K = δ(n + |m| + |M| + 3).
inline std::int64_t witness_bound(const SigmaStructure& a) {
    const auto p = signature_params(a);
    return p.delta * (a.size() + std::abs(p.m) + std::abs(p.big_m) + 3);
}

inline void check_target_signature(const SigmaStructure& a, Target t) {
    for (const auto& r : a.signature()) {
        bool ok = false;
        switch (r.kind) {
            case RelKind::Less:
            case RelKind::Equal: ok = true; break;
            case RelKind::Constant: ok = t == Target::Q || (t == Target::Z && r.constant.is_integer()); break;
            case RelKind::Modulo: ok = t != Target::Q; break;
            case RelKind::Interpreted: ok = false; break;
        }
        if (!ok) throw DomainError("relation " + r.token() + " is not accepted for target " + target_name(t));
    }
}

// ---------------------------------------------------------------------------
// Verification

inline bool in_target(const Rational& v, Target t) {
    switch (t) {
        case Target::Z: return v.is_integer();
        case Target::N: return v.is_integer() && v >= Rational(0);
        case Target::NegZ: return v.is_integer() && v < Rational(0);
        case Target::Q: return true;
    }
    return false;
}

/// Every tuple of every relation holds under h, and h maps into the target.
inline bool verify_hom(const SigmaStructure& a, const std::vector<Rational>& h, Target t) {
    if (static_cast<int>(h.size()) != a.size()) return false;
    for (const auto& v : h)
        if (!in_target(v, t)) return false;
    for (const auto& [r, ts] : a.relations()) {
        if (r.kind == RelKind::Interpreted) return false;
        for (const auto& tup : ts) {
            std::vector<Element> vals;
            for (int e : tup) vals.push_back({h[e]});
            if (!eval_base_relation(r, vals)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Decision procedure

namespace detail {

inline HomDecision fail_with(HomDecision d, HomReason r) {
    d.yes = false;
    d.reason = std::move(r);
    return d;
}

inline std::optional<HomReason> constant_clash(const QuotientStructure& q) {
    for (int c = 0; c < q.size(); ++c)
        if (q.constants[c].size() > 1) {
            HomReason r;
            r.kind = HomReason::Kind::ConstantClash;
            r.classes = {c};
            r.c1 = *q.constants[c].begin();
            r.c2 = *std::next(q.constants[c].begin());
            return r;
        }
    return std::nullopt;
}

inline std::vector<Rational> finish(const SigmaStructure& a, const QuotientStructure& q,
                                    const std::vector<Rational>& class_value, Target t) {
    std::vector<Rational> h(a.size());
    for (int e = 0; e < a.size(); ++e) h[e] = class_value[q.class_of[e]];
    if (!verify_hom(a, h, t)) throw std::logic_error("synthesized witness failed verification");
    return h;
}

inline HomDecision decide_q(const SigmaStructure& a, HomDecision d) {
    const auto& q = d.quotient;
    if (auto r = constant_clash(q)) return fail_with(std::move(d), *r);
    if (auto cyc = check_cycle(q)) {
        HomReason r;
        r.kind = HomReason::Kind::Cycle;
        r.classes = *cyc;
        return fail_with(std::move(d), r);
    }
    const int k = q.size();
    // Pinned classes reachable through E_<+ from each class.
    std::vector<std::vector<int>> reach_pinned(k);
    for (int c = 0; c < k; ++c) {
        std::vector<char> seen(k, 0);
        std::vector<int> work(q.succ[c].begin(), q.succ[c].end());
        for (int x : work) seen[x] = 1;
        while (!work.empty()) {
            const int x = work.back();
            work.pop_back();
            if (!q.constants[x].empty()) reach_pinned[c].push_back(x);
            for (int y : q.succ[x])
                if (!seen[y]) {
                    seen[y] = 1;
                    work.push_back(y);
                }
        }
        std::sort(reach_pinned[c].begin(), reach_pinned[c].end());
    }
    for (int c = 0; c < k; ++c) {
        if (q.constants[c].empty()) continue;
        const Rational p = *q.constants[c].begin();
        for (int x : reach_pinned[c]) {
            if (*q.constants[x].begin() <= p) {
                HomReason r;
                r.kind = HomReason::Kind::OrderConstantConflict;
                r.classes = {c, x};
                r.c1 = p;
                r.c2 = *q.constants[x].begin();
                const auto carrier = [&](int cls, const Rational& v) {
                    for (int e : q.members[cls])
                        if (a.holds(RelationSymbol::constant_eq(v), {e})) return e;
                    return q.members[cls].front();
                };
                r.elem_a = carrier(c, p);
                r.elem_b = carrier(x, r.c2);
                return fail_with(std::move(d), r);
            }
        }
    }
    std::vector<Rational> value(k);
    std::vector<char> all(k, 1);
    for (int c : topo_order(q, all)) {
        if (!q.constants[c].empty()) {
            value[c] = *q.constants[c].begin();
            continue;
        }
        std::optional<Rational> lo, hi;
        for (int p : q.pred[c])
            if (!lo || value[p] > *lo) lo = value[p];
        for (int x : reach_pinned[c]) {
            const Rational v = *q.constants[x].begin();
            if (!hi || v < *hi) hi = v;
        }
        if (lo && hi)
            value[c] = (*lo + *hi) / Rational(2);
        else if (lo)
            value[c] = *lo + Rational(1);
        else if (hi)
            value[c] = *hi - Rational(1);
        else
            value[c] = Rational(0);
    }
    d.yes = true;
    d.witness = finish(a, q, value, Target::Q);
    return d;
}

}  // namespace detail

/// Decides A ⪯ target. The first failing check determines the reason:
/// Z: constant clash, modulo contradiction, cycle, bounded infeasibility.
/// N/negZ: modulo contradiction, cycle. Q: constant clash, cycle, order/constant conflict.
inline HomDecision decide_hom(const SigmaStructure& a, Target t) {
    check_target_signature(a, t);
    HomDecision d;
    d.quotient = build_quotient(a);
    const auto& q = d.quotient;
    if (t == Target::Q) return detail::decide_q(a, std::move(d));

    if (auto r = detail::constant_clash(q)) return detail::fail_with(std::move(d), *r);
    if (auto mc = check_modulo_contradiction(q)) {
        HomReason r;
        r.kind = HomReason::Kind::ModuloContradiction;
        r.classes = {mc->cls};
        r.mod1 = mc->first;
        r.mod2 = mc->second;
        return detail::fail_with(std::move(d), r);
    }
    if (auto cyc = check_cycle(q)) {
        HomReason r;
        r.kind = HomReason::Kind::Cycle;
        r.classes = *cyc;
        return detail::fail_with(std::move(d), r);
    }
    const auto sp = signature_params(a);
    const int k = q.size();
    std::vector<std::int64_t> mc(k);
    for (int c = 0; c < k; ++c) mc[c] = detail::least_solution(q.modulos[c]);
    std::vector<Rational> value(k);

    if (t == Target::N || t == Target::NegZ) {
        const std::vector<char> all(k, 1);
        const auto len = detail::longest_paths(q, all, t == Target::N);
        for (int c = 0; c < k; ++c)
            value[c] = Rational(t == Target::N ? sp.delta * len[c] + mc[c] : sp.delta * (-1 - len[c]) + mc[c]);
        d.yes = true;
        d.witness = detail::finish(a, q, value, t);
        return d;
    }

    const auto part = partition_bgsr(a);
    std::vector<Part> cpart(k);
    for (int c = 0; c < k; ++c) cpart[c] = part.part[q.members[c].front()];
    const auto mask = [&](std::initializer_list<Part> ps) {
        std::vector<char> in(k, 0);
        for (int c = 0; c < k; ++c)
            for (Part p : ps)
                if (cpart[c] == p) in[c] = 1;
        return in;
    };
    const auto bounded = solve_bounded(q, mask({Part::B}), sp.m, sp.big_m);
    if (!bounded.feasible) {
        HomReason r;
        r.kind = HomReason::Kind::BoundedInfeasible;
        r.classes = {bounded.stuck_class};
        return detail::fail_with(std::move(d), r);
    }
    const auto len_r = detail::longest_paths(q, mask({Part::G, Part::S, Part::R}), true);
    const auto len_g = detail::longest_paths(q, mask({Part::G}), true);
    const auto len_s = detail::longest_paths(q, mask({Part::S}), false);
    for (int c = 0; c < k; ++c) {
        const std::int64_t h_r = sp.delta * len_r[c] + mc[c];
        switch (cpart[c]) {
            case Part::B: value[c] = Rational(bounded.value.at(c)); break;
            case Part::R: value[c] = Rational(h_r); break;
            case Part::G: {
                const std::int64_t h_g = sp.delta * len_g[c] + mc[c];
                value[c] = Rational(std::max(h_r, h_g) + sp.delta * (sp.big_m + 1));
                break;
            }
            case Part::S: {
                const std::int64_t h_s = sp.delta * (-1 - len_s[c]) + mc[c];
                value[c] = Rational(std::min(h_r, h_s) + sp.delta * (sp.m - 1));
                break;
            }
        }
    }
    d.yes = true;
    d.witness = detail::finish(a, q, value, t);
    return d;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace detail {

/// Candidate values for the oracle in ascending order.
inline std::vector<Rational> oracle_values(const SigmaStructure& a, std::int64_t k, Target t) {
    std::vector<Rational> vals;
    if (t == Target::Q) {
        std::set<Rational> grid;
        const std::int64_t maxden = a.size() + 1;
        for (std::int64_t den = 1; den <= maxden; ++den)
            for (std::int64_t num = -k * den; num <= k * den; ++num) grid.insert(Rational(num, den));
        vals.assign(grid.begin(), grid.end());
        return vals;
    }
    const std::int64_t lo = t == Target::N ? 0 : -k;
    const std::int64_t hi = t == Target::NegZ ? -1 : k;
    for (std::int64_t v = lo; v <= hi; ++v) vals.emplace_back(v);
    return vals;
}

/// Backtracking with arc consistency over {<, =} and unary pre-filtering.
/// Returns the lexicographically first solution for `vars` (ascending values).
class MacSearch {
public:
    MacSearch(const std::vector<int>& vars, std::vector<std::vector<char>> domains,
              std::vector<std::pair<int, int>> less, std::vector<std::pair<int, int>> equal, int nvals)
        : vars_(vars), dom_(std::move(domains)), nvals_(nvals) {
        arcs_.resize(vars.size());
        for (auto [x, y] : less) add_arc(x, y, true);
        for (auto [x, y] : equal) add_arc(x, y, false);
    }

    std::optional<std::vector<int>> run() {
        if (!propagate(dom_)) return std::nullopt;
        std::vector<int> assignment(vars_.size(), -1);
        if (search(0, dom_, assignment)) return assignment;
        return std::nullopt;
    }

private:
    struct Arc {
        int other;
        bool less;     // this < other (or other < this when !forward)
        bool forward;  // this is the left argument
    };

    void add_arc(int x, int y, bool less) {
        arcs_[x].push_back({y, less, true});
        arcs_[y].push_back({x, less, false});
    }

    /// Removes values of `x` without support on arc `a`.
    bool revise(std::vector<std::vector<char>>& d, int x, const Arc& a) const {
        const auto& dy = d[a.other];
        auto& dx = d[x];
        bool changed = false;
        if (a.less) {
            if (a.forward) {  // x < y: keep x below max(y)
                int maxy = -1;
                for (int v = nvals_ - 1; v >= 0; --v)
                    if (dy[v]) {
                        maxy = v;
                        break;
                    }
                for (int v = std::max(maxy, 0); v < nvals_; ++v)
                    if (dx[v] && v >= maxy) {
                        dx[v] = 0;
                        changed = true;
                    }
            } else {  // y < x: keep x above min(y)
                int miny = nvals_;
                for (int v = 0; v < nvals_; ++v)
                    if (dy[v]) {
                        miny = v;
                        break;
                    }
                for (int v = 0; v <= std::min(miny, nvals_ - 1); ++v)
                    if (dx[v] && v <= miny) {
                        dx[v] = 0;
                        changed = true;
                    }
            }
        } else {
            for (int v = 0; v < nvals_; ++v)
                if (dx[v] && !dy[v]) {
                    dx[v] = 0;
                    changed = true;
                }
        }
        return changed;
    }

    bool propagate(std::vector<std::vector<char>>& d) const {
        std::vector<int> queue;
        std::vector<char> queued(vars_.size(), 1);
        for (std::size_t i = 0; i < vars_.size(); ++i) queue.push_back(static_cast<int>(i));
        while (!queue.empty()) {
            const int y = queue.back();
            queue.pop_back();
            queued[y] = 0;
            for (const auto& back : arcs_[y]) {
                const int x = back.other;
                const Arc toward{y, back.less, !back.forward};
                if (revise(d, x, toward)) {
                    if (std::none_of(d[x].begin(), d[x].end(), [](char c) { return c != 0; })) return false;
                    if (!queued[x]) {
                        queued[x] = 1;
                        queue.push_back(x);
                    }
                }
            }
        }
        return true;
    }

    bool search(std::size_t i, const std::vector<std::vector<char>>& d, std::vector<int>& assignment) const {
        if (i == vars_.size()) return true;
        for (int v = 0; v < nvals_; ++v) {
            if (!d[i][v]) continue;
            auto next = d;
            std::fill(next[i].begin(), next[i].end(), 0);
            next[i][v] = 1;
            if (!propagate(next)) continue;
            assignment[i] = v;
            if (search(i + 1, next, assignment)) return true;
        }
        return false;
    }

    std::vector<int> vars_;
    std::vector<std::vector<char>> dom_;
    std::vector<std::vector<Arc>> arcs_;
    int nvals_;
};

}  // namespace detail

/// Exhaustive oracle: the lexicographically first map into [−K, K] (restricted
/// to the target; a rational grid with denominators ≤ n+1 for Q) that is a
/// homomorphism, or nullopt. Independent of decide_hom.
inline std::optional<std::vector<Rational>> brute_force_hom(const SigmaStructure& a, std::int64_t k,
                                                            Target t = Target::Z) {
    if (k < 1) throw std::invalid_argument("brute_force_hom needs K >= 1");
    check_target_signature(a, t);
    const int n = a.size();
    const auto vals = detail::oracle_values(a, k, t);
    const int nv = static_cast<int>(vals.size());
    std::vector<std::vector<char>> dom(n, std::vector<char>(nv, 1));
    std::vector<std::pair<int, int>> less, equal;
    for (const auto& [r, ts] : a.relations()) {
        for (const auto& tup : ts) {
            switch (r.kind) {
                case RelKind::Less:
                    if (tup[0] == tup[1]) return std::nullopt;
                    less.emplace_back(tup[0], tup[1]);
                    break;
                case RelKind::Equal:
                    if (tup[0] != tup[1]) equal.emplace_back(tup[0], tup[1]);
                    break;
                default:
                    for (int v = 0; v < nv; ++v)
                        if (dom[tup[0]][v] && !eval_base_relation(r, {{vals[v]}})) dom[tup[0]][v] = 0;
                    break;
            }
        }
    }
    // Connected components over the binary constraints.
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    std::vector<std::vector<int>> adj(n);
    for (auto [x, y] : less) adj[x].push_back(y), adj[y].push_back(x);
    for (auto [x, y] : equal) adj[x].push_back(y), adj[y].push_back(x);
    for (int e = 0; e < n; ++e) {
        if (comp[e] >= 0) continue;
        std::vector<int> work = {e};
        comp[e] = ncomp;
        while (!work.empty()) {
            const int x = work.back();
            work.pop_back();
            for (int y : adj[x])
                if (comp[y] < 0) {
                    comp[y] = ncomp;
                    work.push_back(y);
                }
        }
        ++ncomp;
    }
    std::vector<Rational> h(n);
    for (int c = 0; c < ncomp; ++c) {
        std::vector<int> vars;
        std::vector<int> local(n, -1);
        for (int e = 0; e < n; ++e)
            if (comp[e] == c) {
                local[e] = static_cast<int>(vars.size());
                vars.push_back(e);
            }
        std::vector<std::vector<char>> d;
        for (int e : vars) d.push_back(dom[e]);
        std::vector<std::pair<int, int>> l2, e2;
        for (auto [x, y] : less)
            if (comp[x] == c) l2.emplace_back(local[x], local[y]);
        for (auto [x, y] : equal)
            if (comp[x] == c) e2.emplace_back(local[x], local[y]);
        auto sol = detail::MacSearch(vars, std::move(d), std::move(l2), std::move(e2), nv).run();
        if (!sol) return std::nullopt;
        for (std::size_t i = 0; i < vars.size(); ++i) h[vars[i]] = vals[(*sol)[i]];
    }
    return h;
}

}  // namespace ctlz
