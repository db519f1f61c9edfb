#pragma once

// Builders for the reachability, cycle and path formulas, the homomorphism
// characterization sentences over {<, =, =_c, ≡_{a,b}}, and the encoding of a
// σ-sentence over the extended Kripke tree T^e.
//
// Tree signature of T^e: binary succ_<i> for the i-th child (1-based), unary
// atoms for propositions, and q<i> marking the copy child of variable i.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/model.hpp"
#include "ctlz/mso.hpp"
#include "ctlz/rewrite.hpp"
#include "ctlz/structure.hpp"

namespace ctlz {

inline void check_edge(const MsoBinary& edge) {
    const auto fv = free_vars(edge.body);
    for (const auto& v : fv.fo)
        if (v != edge.x && v != edge.y)
            throw DomainError("edge formula has free variable '" + v + "' besides " + edge.x + ", " + edge.y);
    if (!fv.so.empty()) throw DomainError("edge formula has free set variable '" + *fv.so.begin() + "'");
}

/// reach_φ(a,b) = ∃X ∀Y ((a ∈ Y ∧ ∀x∀y((x ∈ Y ∧ y ∈ X ∧ φ(x,y)) → y ∈ Y)) → b ∈ Y).
inline Mso mso_reach(const MsoBinary& edge, const std::string& a, const std::string& b, NameGen& names) {
    check_edge(edge);
    const std::string X = names.fresh("X"), Y = names.fresh("Y"), x = names.fresh("x"), y = names.fresh("y");
    const Mso closed = Mso::forall(
        x, Mso::forall(y, Mso::implies(Mso::conj({Mso::in(x, Y), Mso::in(y, X), edge.at(x, y, names)}), Mso::in(y, Y))));
    return Mso::exists_set(X, Mso::forall_set(Y, Mso::implies(Mso::conj({Mso::in(a, Y), closed}), Mso::in(b, Y))));
}

/// reach^Z_φ(a,b) = a ∈ Z ∧ ∀Y ⊆ Z ((a ∈ Y ∧ ∀x∀y((x ∈ Y ∧ y ∈ Z ∧ φ(x,y)) → y ∈ Y)) → b ∈ Y).
inline Mso mso_reach_within(const MsoBinary& edge, const std::string& a, const std::string& b, const std::string& Z,
                            NameGen& names) {
    check_edge(edge);
    const std::string Y = names.fresh("Y"), x = names.fresh("x"), y = names.fresh("y");
    const Mso closed = Mso::forall(
        x, Mso::forall(y, Mso::implies(Mso::conj({Mso::in(x, Y), Mso::in(y, Z), edge.at(x, y, names)}), Mso::in(y, Y))));
    const Mso within = subset_of(Y, MsoUnary{Mso::in("z", Z), "z"}, names);
    return Mso::conj({Mso::in(a, Z),
                      Mso::forall_set(Y, Mso::implies(within, Mso::implies(Mso::conj({Mso::in(a, Y), closed}),
                                                                             Mso::in(b, Y))))});
}

/// ECycle_φ = ∃x∃y (reach_φ(x,y) ∧ φ(y,x)).
inline Mso mso_ecycle(const MsoBinary& edge, NameGen& names) {
    const std::string x = names.fresh("x"), y = names.fresh("y");
    return Mso::exists(x, Mso::exists(y, Mso::conj({mso_reach(edge, x, y, names), edge.at(y, x, names)})));
}

/// Path_φ(a,b,Z) = ∀x ∈ Z [∀y ∈ Z (reach^Z(x,y) ∨ reach^Z(y,x)) ∧ reach^Z(a,x) ∧ reach^Z(x,b)].
inline Mso mso_path(const MsoBinary& edge, const std::string& a, const std::string& b, const std::string& Z,
                    NameGen& names) {
    const std::string x = names.fresh("x"), y = names.fresh("y");
    const Mso linear = Mso::forall(
        y, Mso::implies(Mso::in(y, Z), Mso::disj({mso_reach_within(edge, x, y, Z, names),
                                                  mso_reach_within(edge, y, x, Z, names)})));
    return Mso::forall(x, Mso::implies(Mso::in(x, Z), Mso::conj({linear, mso_reach_within(edge, a, x, Z, names),
                                                                 mso_reach_within(edge, x, b, Z, names)})));
}

/// BPaths_φ(a,b) = B Z: Path_φ(a,b,Z).
inline Mso mso_bpaths(const MsoBinary& edge, const std::string& a, const std::string& b, NameGen& names) {
    const std::string Z = names.fresh("Z");
    return Mso::bound(Z, mso_path(edge, a, b, Z, names));
}

enum class CoreKind { Reach, ReachRestricted, ECycle, Path, BPaths };

inline CoreKind parse_core_kind(const std::string& s) {
    if (s == "reach") return CoreKind::Reach;
    if (s == "reach_restricted") return CoreKind::ReachRestricted;
    if (s == "ecycle") return CoreKind::ECycle;
    if (s == "path") return CoreKind::Path;
    if (s == "bpaths") return CoreKind::BPaths;
    throw DomainError("unknown formula kind '" + s + "' (expected reach, reach_restricted, ecycle, path, bpaths)");
}

/// The named formula over `edge`; free variables are a, b (and the set Z for
/// reach_restricted and path).
inline Mso emit_core_formula(CoreKind kind, const MsoBinary& edge) {
    check_edge(edge);
    NameGen names;
    switch (kind) {
        case CoreKind::Reach: return mso_reach(edge, "a", "b", names);
        case CoreKind::ReachRestricted: return mso_reach_within(edge, "a", "b", "Z", names);
        case CoreKind::ECycle: return mso_ecycle(edge, names);
        case CoreKind::Path: return mso_path(edge, "a", "b", "Z", names);
        case CoreKind::BPaths: return mso_bpaths(edge, "a", "b", names);
    }
    return Mso::top();
}

// ---------------------------------------------------------------------------
// Homomorphism sentences

enum class HomTarget { ZOrderOnly, Z, N, NegZ };

inline HomTarget parse_hom_target(const std::string& s) {
    if (s == "Z_order_only") return HomTarget::ZOrderOnly;
    if (s == "Z") return HomTarget::Z;
    if (s == "N") return HomTarget::N;
    if (s == "negZ") return HomTarget::NegZ;
    throw DomainError("unknown MSO target '" + s + "' (expected Z_order_only, Z, N, negZ)");
}

struct HomSentence {
    Mso sentence;
    /// Set variables quantified by φ_B (Z only), X_m .. X_M.
    std::vector<std::string> set_vars;
    Mso phi_b;
    Mso phi_mod;
    Mso phi_modcon;
};

namespace detail {

inline std::string value_set_name(std::int64_t i) {
    return i < 0 ? "Xm" + std::to_string(-i) : "X" + std::to_string(i);
}

inline MsoBinary edge_atom(const std::string& rel, NameGen& names) {
    const std::string x = names.fresh("x"), y = names.fresh("y");
    return {Mso::atom(rel, {x, y}), x, y};
}

class HomBuilder {
public:
    HomBuilder(const std::set<RelationSymbol>& sigma, NameGen& names) : names_(names) {
        for (const auto& r : sigma) {
            switch (r.kind) {
                case RelKind::Less: has_lt_ = true; break;
                case RelKind::Equal: has_eq_ = true; break;
                case RelKind::Constant:
                    if (!r.constant.is_integer()) throw DomainError("non-integer constant " + r.token() + " in σ");
                    constants_.push_back(r.constant.num());
                    break;
                case RelKind::Modulo: mods_.emplace_back(r.residue, r.modulus); break;
                case RelKind::Interpreted: throw DomainError("unsupported signature symbol " + r.token());
            }
        }
        std::sort(constants_.begin(), constants_.end());
        for (auto c : constants_) {
            m_ = std::min(m_, c);
            big_m_ = std::max(big_m_, c);
        }
    }

    [[nodiscard]] bool order_only() const { return constants_.empty() && mods_.empty(); }

    /// φ̃: reach over E_= ∪ E_=⁻¹.
    const MsoBinary& sim() {
        if (!sim_) {
            const std::string x = names_.fresh("x"), y = names_.fresh("y");
            const MsoBinary sym{Mso::disj({Mso::atom("eq", {x, y}), Mso::atom("eq", {y, x})}), x, y};
            const std::string a = names_.fresh("x"), b = names_.fresh("y");
            sim_ = MsoBinary{mso_reach(sym, a, b, names_), a, b};
        }
        return *sim_;
    }

    /// E_<: the lt atom, or ∃u∃v(φ̃(x,u) ∧ u < v ∧ φ̃(v,y)) when = is present.
    const MsoBinary& less() {
        if (!less_) {
            if (!has_eq_) {
                less_ = edge_atom("lt", names_);
            } else {
                const std::string x = names_.fresh("x"), y = names_.fresh("y"), u = names_.fresh("u"),
                                  v = names_.fresh("v");
                const Mso body = Mso::exists(
                    u, Mso::exists(v, Mso::conj({sim().at(x, u, names_), Mso::atom("lt", {u, v}), sim().at(v, y, names_)})));
                less_ = MsoBinary{body, x, y};
            }
        }
        return *less_;
    }

    /// ≤ as x < y ∨ E_=(x,y) ∨ E_=(y,x).
    MsoBinary leq() {
        const std::string x = names_.fresh("x"), y = names_.fresh("y");
        std::vector<Mso> parts;
        if (has_lt_) parts.push_back(Mso::atom("lt", {x, y}));
        if (has_eq_) {
            parts.push_back(Mso::atom("eq", {x, y}));
            parts.push_back(Mso::atom("eq", {y, x}));
        }
        return {Mso::disj(std::move(parts)), x, y};
    }

    Mso is_constant(const std::string& x) {
        std::vector<Mso> parts;
        for (auto c : constants_) parts.push_back(Mso::atom("eqc[" + std::to_string(c) + "]", {x}));
        return Mso::disj(std::move(parts));
    }

    const MsoUnary& bounded() {
        if (!bounded_) {
            const MsoBinary le = leq();
            const std::string x = names_.fresh("x"), y = names_.fresh("y"), z = names_.fresh("z");
            const Mso body = Mso::exists(
                y, Mso::exists(z, Mso::conj({is_constant(y), is_constant(z), mso_reach(le, y, x, names_),
                                             mso_reach(le, x, z, names_)})));
            bounded_ = MsoUnary{body, x};
        }
        return *bounded_;
    }

    /// greater (upward) or smaller (downward) than some bounded element.
    MsoUnary beyond(bool upward) {
        const MsoBinary le = leq();
        const std::string x = names_.fresh("x"), y = names_.fresh("y");
        const Mso reach = upward ? mso_reach(le, y, x, names_) : mso_reach(le, x, y, names_);
        return {Mso::conj({Mso::neg(bounded().at(x, names_)),
                           Mso::exists(y, Mso::conj({bounded().at(y, names_), reach}))}),
                x};
    }

    const MsoUnary& greater() {
        if (!greater_) greater_ = beyond(true);
        return *greater_;
    }
    const MsoUnary& smaller() {
        if (!smaller_) smaller_ = beyond(false);
        return *smaller_;
    }

    MsoUnary rest() {
        const std::string x = names_.fresh("x");
        return {Mso::conj({Mso::neg(bounded().at(x, names_)), Mso::neg(greater().at(x, names_)),
                           Mso::neg(smaller().at(x, names_))}),
                x};
    }

    /// ¬ECycle_< ∧ ∀x∀y BPaths_<(x,y).
    Mso z_order() {
        const std::string x = names_.fresh("x"), y = names_.fresh("y");
        return Mso::conj({Mso::neg(mso_ecycle(less(), names_)),
                          Mso::forall(x, Mso::forall(y, mso_bpaths(less(), x, y, names_)))});
    }

    /// ¬ECycle_< ∧ ∀y B Z ∃x Path_<(x,y,Z), or Path_<(y,x,Z) for ℤ∖ℕ.
    Mso half_line(bool upward) {
        const std::string x = names_.fresh("x"), y = names_.fresh("y"), Z = names_.fresh("Z");
        const Mso path = upward ? mso_path(less(), x, y, Z, names_) : mso_path(less(), y, x, Z, names_);
        return Mso::conj({Mso::neg(mso_ecycle(less(), names_)), Mso::forall(y, Mso::bound(Z, Mso::exists(x, path)))});
    }

    /// ∃X_m..X_M (φ_part ∧ φ_< ∧ φ_= ∧ φ_const ∧ φ_mod).
    Mso assignment(std::vector<std::string>& sets, Mso& phi_mod) {
        std::vector<std::int64_t> values;
        for (std::int64_t i = m_; i <= big_m_; ++i) {
            values.push_back(i);
            sets.push_back(value_set_name(i));
        }
        const auto set_of = [&](std::int64_t i) { return value_set_name(i); };
        const std::string x = names_.fresh("x"), y = names_.fresh("y");

        std::vector<Mso> exactly_one;
        for (auto i : values) {
            std::vector<Mso> parts{Mso::in(x, set_of(i))};
            for (auto j : values)
                if (j != i) parts.push_back(Mso::neg(Mso::in(x, set_of(j))));
            exactly_one.push_back(Mso::conj(std::move(parts)));
        }
        const Mso part = Mso::forall(x, Mso::disj(std::move(exactly_one)));

        Mso order = Mso::top();
        if (has_lt_) {
            std::vector<Mso> parts;
            for (auto i : values)
                for (auto j : values)
                    if (i >= j)
                        parts.push_back(
                            Mso::neg(Mso::conj({Mso::atom("lt", {x, y}), Mso::in(x, set_of(i)), Mso::in(y, set_of(j))})));
            order = Mso::forall(x, Mso::forall(y, Mso::conj(std::move(parts))));
        }

        Mso equal = Mso::top();
        if (has_eq_) {
            std::vector<Mso> parts;
            for (auto i : values)
                for (auto j : values)
                    if (i != j)
                        parts.push_back(
                            Mso::neg(Mso::conj({Mso::atom("eq", {x, y}), Mso::in(x, set_of(i)), Mso::in(y, set_of(j))})));
            equal = Mso::forall(x, Mso::forall(y, Mso::conj(std::move(parts))));
        }

        std::vector<Mso> consts;
        for (auto c : constants_)
            consts.push_back(Mso::implies(Mso::atom("eqc[" + std::to_string(c) + "]", {x}), Mso::in(x, set_of(c))));
        const Mso constant = consts.empty() ? Mso::top() : Mso::forall(x, Mso::conj(std::move(consts)));

        std::vector<Mso> mods;
        for (const auto& [a, b] : mods_) {
            std::vector<Mso> options;
            for (auto i : values)
                if (((i % b) + b) % b == a) options.push_back(Mso::in(x, set_of(i)));
            mods.push_back(Mso::implies(Mso::atom("mod[" + std::to_string(a) + "," + std::to_string(b) + "]", {x}),
                                        Mso::disj(std::move(options))));
        }
        phi_mod = mods.empty() ? Mso::top() : Mso::forall(x, Mso::conj(std::move(mods)));

        Mso body = Mso::conj({part, order, equal, constant, phi_mod});
        for (auto it = sets.rbegin(); it != sets.rend(); ++it) body = Mso::exists_set(*it, body);
        return body;
    }

    /// ⋁ over pairwise contradictory congruences: ∃x1∃x2 (x1 ∼ x2 ∧ x1 ≡ a1 ∧ x2 ≡ a2).
    Mso modcon() {
        std::vector<Mso> parts;
        for (std::size_t i = 0; i < mods_.size(); ++i) {
            for (std::size_t j = i + 1; j < mods_.size(); ++j) {
                const auto [a1, b1] = mods_[i];
                const auto [a2, b2] = mods_[j];
                if ((a1 - a2) % std::gcd(b1, b2) == 0) continue;
                const std::string x1 = names_.fresh("x"), x2 = names_.fresh("x");
                parts.push_back(Mso::exists(
                    x1, Mso::exists(
                            x2, Mso::conj({sim().at(x1, x2, names_), sim().at(x2, x1, names_),
                                           Mso::atom("mod[" + std::to_string(a1) + "," + std::to_string(b1) + "]", {x1}),
                                           Mso::atom("mod[" + std::to_string(a2) + "," + std::to_string(b2) + "]", {x2})}))));
            }
        }
        return Mso::disj(std::move(parts));
    }

    NameGen& names_;
    bool has_lt_ = false, has_eq_ = false;
    std::vector<std::int64_t> constants_;
    std::vector<std::pair<std::int64_t, std::int64_t>> mods_;
    std::int64_t m_ = 0, big_m_ = 0;
    std::optional<MsoBinary> sim_, less_;
    std::optional<MsoUnary> bounded_, greater_, smaller_;
};

}  // namespace detail

/// The characterization sentence for homomorphisms from finite σ-structures.
/// Z_order_only, N and negZ accept σ ⊆ {<, =}; Z accepts constants and congruences.
inline HomSentence emit_hom_sentence_parts(const std::set<RelationSymbol>& sigma, HomTarget target) {
    NameGen names;
    detail::HomBuilder hb(sigma, names);
    HomSentence out;
    if (target != HomTarget::Z) {
        if (!hb.order_only())
            throw DomainError("constants and congruences are only supported for target Z");
        if (target == HomTarget::ZOrderOnly) out.sentence = hb.z_order();
        else out.sentence = hb.half_line(target == HomTarget::N);
        return out;
    }
    const Mso psi = hb.assignment(out.set_vars, out.phi_mod);
    out.phi_b = relativize(psi, hb.bounded(), names);
    const MsoUnary greater = hb.greater(), smaller = hb.smaller();
    const MsoUnary rest = hb.rest();
    const std::string g = names.fresh("x");
    const MsoUnary unbounded{Mso::disj({greater.at(g, names), smaller.at(g, names), rest.at(g, names)}), g};
    out.phi_modcon = hb.modcon();
    out.sentence = Mso::conj({out.phi_b, relativize(hb.z_order(), unbounded, names),
                              relativize(hb.half_line(true), greater, names),
                              relativize(hb.half_line(false), smaller, names), Mso::neg(out.phi_modcon)});
    return out;
}

inline Mso emit_hom_sentence(const std::set<RelationSymbol>& sigma, HomTarget target) {
    return emit_hom_sentence_parts(sigma, target).sentence;
}

// ---------------------------------------------------------------------------
// Extended tree encoding

struct TreeEncoding {
    Mso beta;
    Mso alpha_e;
    /// q(x) = ⋁ q_i(x) over the variable x.
    MsoUnary q;
};

inline std::string succ_name(int i) { return "succ_" + std::to_string(i); }
inline std::string copy_prop(int i) { return "q" + std::to_string(i); }

namespace detail {

inline Mso any_succ(int from, int to, const std::string& x, const std::string& y) {
    std::vector<Mso> parts;
    for (int c = from; c <= to; ++c) parts.push_back(Mso::atom(succ_name(c), {x, y}));
    return Mso::disj(std::move(parts));
}

}  // namespace detail

/// β and α^e for m variables and branching d. `table` gives the constraint of
/// each abstraction proposition, `vars` the register variables (copy child
/// d+i belongs to vars[i-1]) and `props` every other proposition of the tree.
inline TreeEncoding emit_tree_encoding(const Mso& alpha, int m, int d, const AbstractionTable& table,
                                       const std::vector<std::string>& vars, const std::vector<std::string>& props) {
    if (m != static_cast<int>(vars.size())) throw DomainError("variable count does not match the variable list");
    if (d < 1 || m < 0) throw DomainError("branching must be positive and the variable count nonnegative");
    NameGen names("t");
    TreeEncoding out;
    {
        std::vector<Mso> qs;
        for (int i = 1; i <= m; ++i) qs.push_back(Mso::atom(copy_prop(i), {"x"}));
        out.q = MsoUnary{Mso::disj(std::move(qs)), "x"};
    }
    std::vector<std::string> all_props(props);
    for (const auto& e : table)
        if (std::find(all_props.begin(), all_props.end(), e.prop) == all_props.end()) all_props.push_back(e.prop);

    const auto main_edge = [&] {
        const std::string x = names.fresh("x"), y = names.fresh("y");
        return MsoBinary{detail::any_succ(1, d, x, y), x, y};
    };
    const auto any_edge = [&] {
        const std::string x = names.fresh("x"), y = names.fresh("y");
        return MsoBinary{detail::any_succ(1, d + m, x, y), x, y};
    };
    const auto root = [&](const std::string& r) {
        const std::string y = names.fresh("y");
        return Mso::neg(Mso::exists(y, detail::any_succ(1, d + m, y, r)));
    };
    const auto main_node = [&](const std::string& x) {
        const std::string r = names.fresh("r");
        return Mso::exists(r, Mso::conj({root(r), mso_reach(main_edge(), r, x, names)}));
    };
    const auto copy_node = [&](const std::string& x) {
        const std::string y = names.fresh("y");
        return Mso::exists(y, Mso::conj({main_node(y), detail::any_succ(d + 1, d + m, y, x)}));
    };
    const auto unlabelled = [&](const std::string& y, int keep_q) {
        std::vector<Mso> parts;
        for (int j = 1; j <= m; ++j)
            parts.push_back(j == keep_q ? Mso::atom(copy_prop(j), {y}) : Mso::neg(Mso::atom(copy_prop(j), {y})));
        for (const auto& p : all_props) parts.push_back(Mso::neg(Mso::atom(p, {y})));
        return Mso::conj(std::move(parts));
    };

    std::vector<Mso> beta;
    for (int i = d + 1; i <= d + m; ++i) {
        const std::string x = names.fresh("x"), y = names.fresh("y");
        beta.push_back(Mso::forall(
            x, Mso::forall(y, Mso::implies(Mso::conj({main_node(x), Mso::atom(succ_name(i), {x, y})}),
                                           unlabelled(y, i - d)))));
    }
    {
        const std::string x = names.fresh("x"), y = names.fresh("y");
        beta.push_back(Mso::forall(
            x, Mso::forall(y, Mso::implies(Mso::conj({copy_node(x), mso_reach(any_edge(), x, y, names),
                                                      Mso::neg(Mso::eq(x, y))}),
                                           unlabelled(y, 0)))));
    }
    {
        const std::string x = names.fresh("x");
        std::vector<Mso> no_q;
        for (int j = 1; j <= m; ++j) no_q.push_back(Mso::neg(Mso::atom(copy_prop(j), {x})));
        beta.push_back(Mso::forall(x, Mso::implies(main_node(x), Mso::conj(std::move(no_q)))));
    }
    out.beta = Mso::conj(std::move(beta));

    // After relativizing α to q, each σ-atom becomes: some main path
    // w_0 .. w_{d_i} carries p_i at its end and each argument is the copy
    // child of the right w_j.
    std::function<Mso(const Mso&)> encode = [&](const Mso& f) -> Mso {
        switch (f.kind()) {
            case Mso::Kind::Atom: {
                RelationSymbol r;
                try {
                    r = parse_relation_token(f.name(), static_cast<int>(f.args().size()));
                } catch (const Error&) {
                    return f;
                }
                // Tree-signature atoms such as the q guards stay as they are.
                if (r.kind == RelKind::Interpreted) return f;
                std::vector<Mso> options;
                for (const auto& e : table) {
                    if (e.constraint.rel != r) continue;
                    std::vector<std::string> w;
                    for (int j = 0; j <= e.depth; ++j) w.push_back(names.fresh("w"));
                    std::vector<Mso> parts;
                    for (int j = 0; j < e.depth; ++j) parts.push_back(detail::any_succ(1, d, w[j], w[j + 1]));
                    parts.push_back(Mso::atom(e.prop, {w[e.depth]}));
                    for (std::size_t t = 0; t < f.args().size(); ++t) {
                        const Term& term = e.constraint.args[t];
                        const auto vi = std::find(vars.begin(), vars.end(), term.var);
                        if (vi == vars.end())
                            throw DomainError("constraint variable '" + term.var + "' not among the encoded variables");
                        const int child = d + 1 + static_cast<int>(vi - vars.begin());
                        parts.push_back(Mso::atom(succ_name(child), {w[term.offset], f.args()[t]}));
                    }
                    Mso body = Mso::conj(std::move(parts));
                    for (auto it = w.rbegin(); it != w.rend(); ++it) body = Mso::exists(*it, body);
                    options.push_back(body);
                }
                return Mso::disj(std::move(options));
            }
            case Mso::Kind::True:
            case Mso::Kind::False:
            case Mso::Kind::In:
            case Mso::Kind::Eq: return f;
            case Mso::Kind::Not: return Mso::neg(encode(f.body()));
            case Mso::Kind::And:
            case Mso::Kind::Or: {
                std::vector<Mso> kids;
                for (const auto& k : f.kids()) kids.push_back(encode(k));
                return f.kind() == Mso::Kind::And ? Mso::conj(std::move(kids)) : Mso::disj(std::move(kids));
            }
            case Mso::Kind::Implies: return Mso::implies(encode(f.kids()[0]), encode(f.kids()[1]));
            case Mso::Kind::Exists: return Mso::exists(f.name(), encode(f.body()));
            case Mso::Kind::Forall: return Mso::forall(f.name(), encode(f.body()));
            case Mso::Kind::ExistsSet: return Mso::exists_set(f.name(), encode(f.body()));
            case Mso::Kind::ForallSet: return Mso::forall_set(f.name(), encode(f.body()));
            case Mso::Kind::Bound: return Mso::bound(f.name(), encode(f.body()));
        }
        return f;
    };
    out.alpha_e = encode(relativize(alpha, out.q, names));
    return out;
}

/// Finite truncation of T^e for a labelled tree: main nodes keep their ids and
/// labels; the copy child of node v for variable i is named "v:x_i" and carries q_i.
inline SigmaStructure finite_extended_tree(const ConstraintKripke& t, const std::vector<std::string>& vars) {
    detail::require_tree(t);
    const int d = t.branching();
    const int m = static_cast<int>(vars.size());
    SigmaStructure s;
    for (const auto& n : t.nodes()) s.add_element(n);
    for (const auto& n : t.nodes())
        for (const auto& x : vars) s.add_element(graph_element_name(n, x));
    for (int c = 1; c <= d + m; ++c) s.declare(RelationSymbol::interpreted(succ_name(c), 2));
    for (int i = 1; i <= m; ++i) s.declare(RelationSymbol::interpreted(copy_prop(i), 1));
    for (int v = 0; v < t.size(); ++v) {
        for (int w : t.successors(v)) {
            const std::string word = t.word(w);
            s.add(RelationSymbol::interpreted(succ_name(word.back() - '0'), 2), {v, w});
        }
        for (int i = 0; i < m; ++i) {
            const int c = s.index_of(graph_element_name(t.node(v), vars[i]));
            s.add(RelationSymbol::interpreted(succ_name(d + 1 + i), 2), {v, c});
            s.add(RelationSymbol::interpreted(copy_prop(i + 1), 1), {c});
        }
        for (const auto& p : t.labels(v)) s.add(RelationSymbol::interpreted(p, 1), {v});
    }
    return s;
}

}  // namespace ctlz
