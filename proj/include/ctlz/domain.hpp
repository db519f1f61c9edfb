#pragma once

// Concrete domains: Z, N, Z\N, Q with constants, Allen intervals over Z and
// lexicographically ordered Z^n. Each domain evaluates its relation symbols,
// supplies a positive existential definition of every complement, and the
// derived domains carry an existential interpretation into (Z, <, =).

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/rational.hpp"

namespace ctlz {

/// Domain element: one component for number domains, two for Allen
/// intervals [s,e], n for lexicographic tuples.
using Element = std::vector<Rational>;

inline std::string format_element(const Element& e) {
    if (e.size() == 1) return e[0].str();
    std::string out = "(";
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) out += ",";
        out += e[i].str();
    }
    return out + ")";
}

/// Accepts "5", "-1/2" or a tuple "(a,b,...)".
inline Element parse_element(const std::string& text) {
    try {
        if (!text.empty() && text.front() == '(') {
            if (text.back() != ')') throw std::invalid_argument("unterminated tuple");
            Element out;
            std::string item;
            for (std::size_t i = 1; i + 1 < text.size(); ++i) {
                if (text[i] == ',') {
                    out.push_back(Rational::parse(item));
                    item.clear();
                } else if (text[i] != ' ') {
                    item += text[i];
                }
            }
            out.push_back(Rational::parse(item));
            return out;
        }
        return {Rational::parse(text)};
    } catch (const std::exception& e) {
        throw DomainError("malformed value '" + text + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Positive quantifier-free formulas over argument slots

/// Reference to a formula argument: parameter `index` (an argument of the
/// defined relation, optionally one component of it) or fresh variable `index`.
struct Slot {
    bool fresh = false;
    int index = 0;
    int component = -1;  // -1: the whole element

    static Slot param(int i, int comp = -1) { return {false, i, comp}; }
    static Slot var(int i) { return {true, i, -1}; }

    friend bool operator==(const Slot&, const Slot&) = default;
};

/// Boolean combination of atoms built from conjunction and disjunction only.
struct PosFormula {
    enum class Kind { True, False, Atom, And, Or };
    Kind kind = Kind::True;
    RelationSymbol rel;
    std::vector<Slot> args;
    std::vector<PosFormula> kids;

    static PosFormula truth() { return {}; }
    static PosFormula falsity() { return {Kind::False, {}, {}, {}}; }
    static PosFormula atom(RelationSymbol r, std::vector<Slot> a) { return {Kind::Atom, std::move(r), std::move(a), {}}; }
    static PosFormula both(std::vector<PosFormula> k) { return {Kind::And, {}, {}, std::move(k)}; }
    static PosFormula either(std::vector<PosFormula> k) { return {Kind::Or, {}, {}, std::move(k)}; }
};

/// ∃z_1..z_m body(y, z).
struct NegationEntry {
    int fresh_count = 0;
    PosFormula body;
};

/// Evaluates `f` with parameter and fresh values already fixed; `rel_eval`
/// decides atoms on whole-element or component arguments.
inline bool eval_positive(const PosFormula& f, const std::vector<Element>& params, const std::vector<Element>& fresh,
                          const std::function<bool(const RelationSymbol&, const std::vector<Element>&)>& rel_eval) {
    switch (f.kind) {
        case PosFormula::Kind::True: return true;
        case PosFormula::Kind::False: return false;
        case PosFormula::Kind::And:
            return std::all_of(f.kids.begin(), f.kids.end(),
                               [&](const PosFormula& k) { return eval_positive(k, params, fresh, rel_eval); });
        case PosFormula::Kind::Or:
            return std::any_of(f.kids.begin(), f.kids.end(),
                               [&](const PosFormula& k) { return eval_positive(k, params, fresh, rel_eval); });
        case PosFormula::Kind::Atom: break;
    }
    std::vector<Element> args;
    args.reserve(f.args.size());
    for (const auto& s : f.args) {
        const Element& src = s.fresh ? fresh.at(s.index) : params.at(s.index);
        args.push_back(s.component < 0 ? src : Element{src.at(s.component)});
    }
    return rel_eval(f.rel, args);
}

// ---------------------------------------------------------------------------
// Evaluators for the base integer/rational signature

inline bool eval_base_relation(const RelationSymbol& r, const std::vector<Element>& t) {
    auto scalar = [&](std::size_t i) -> const Rational& {
        if (t.at(i).size() != 1) throw DomainError("relation " + r.token() + " expects scalar arguments");
        return t[i][0];
    };
    switch (r.kind) {
        case RelKind::Less: return scalar(0) < scalar(1);
        case RelKind::Equal: return scalar(0) == scalar(1);
        case RelKind::Constant: return scalar(0) == r.constant;
        case RelKind::Modulo: {
            const Rational& v = scalar(0);
            return v.is_integer() && floor_mod(v.num(), r.modulus) == r.residue;
        }
        case RelKind::Interpreted: break;
    }
    throw DomainError("relation " + r.token() + " is not part of the base signature");
}

// ---------------------------------------------------------------------------
// Existential interpretation into (Z, <, =)

/// Tuples of width n over Z define the source domain. The domain formula
/// ranges over component slots of parameter 0 plus `domain_fresh` fresh
/// variables; each relation formula ranges over component slots of its
/// arguments plus its own fresh variables.
struct ExistentialInterpretation {
    int tuple_width = 1;
    int domain_fresh = 0;
    PosFormula domain_formula;
    bool domain_total = true;
    struct RelationEntry {
        int arity = 2;
        int fresh = 0;
        PosFormula formula;
    };
    std::map<std::string, RelationEntry> relations;
};

// ---------------------------------------------------------------------------
// Allen interval relations on [s,e] with s < e

struct AllenRelation {
    const char* name;
    const char* alias;
    const char* inverse;
};

inline const std::vector<AllenRelation>& allen_relations() {
    static const std::vector<AllenRelation> rels = {
        {"before", "b", "after"},          {"after", "bi", "before"},
        {"meets", "m", "metby"},           {"metby", "mi", "meets"},
        {"overlaps", "o", "overlappedby"}, {"overlappedby", "oi", "overlaps"},
        {"during", "d", "contains"},       {"contains", "di", "during"},
        {"starts", "s", "startedby"},      {"startedby", "si", "starts"},
        {"finishes", "f", "finishedby"},   {"finishedby", "fi", "finishes"},
        {"equals", "e", "equals"},
    };
    return rels;
}

/// Canonical Allen name for a name or alias, or empty.
inline std::string allen_canonical(const std::string& n) {
    for (const auto& r : allen_relations())
        if (n == r.name || n == r.alias) return r.name;
    return {};
}

namespace detail {

/// Endpoint formula of an Allen relation over params 0 = I, 1 = J with components 0 = s, 1 = e.
inline PosFormula allen_endpoint_formula(const std::string& name) {
    const auto lt = [](int a, int ca, int b, int cb) {
        return PosFormula::atom(RelationSymbol::less(), {Slot::param(a, ca), Slot::param(b, cb)});
    };
    const auto eq = [](int a, int ca, int b, int cb) {
        return PosFormula::atom(RelationSymbol::equal(), {Slot::param(a, ca), Slot::param(b, cb)});
    };
    constexpr int S = 0, E = 1;
    if (name == "before") return lt(0, E, 1, S);
    if (name == "after") return lt(1, E, 0, S);
    if (name == "meets") return eq(0, E, 1, S);
    if (name == "metby") return eq(1, E, 0, S);
    if (name == "overlaps") return PosFormula::both({lt(0, S, 1, S), lt(1, S, 0, E), lt(0, E, 1, E)});
    if (name == "overlappedby") return PosFormula::both({lt(1, S, 0, S), lt(0, S, 1, E), lt(1, E, 0, E)});
    if (name == "during") return PosFormula::both({lt(1, S, 0, S), lt(0, E, 1, E)});
    if (name == "contains") return PosFormula::both({lt(0, S, 1, S), lt(1, E, 0, E)});
    if (name == "starts") return PosFormula::both({eq(0, S, 1, S), lt(0, E, 1, E)});
    if (name == "startedby") return PosFormula::both({eq(0, S, 1, S), lt(1, E, 0, E)});
    if (name == "finishes") return PosFormula::both({lt(1, S, 0, S), eq(0, E, 1, E)});
    if (name == "finishedby") return PosFormula::both({lt(0, S, 1, S), eq(0, E, 1, E)});
    if (name == "equals") return PosFormula::both({eq(0, S, 1, S), eq(0, E, 1, E)});
    throw DomainError("unknown Allen relation '" + name + "'");
}

inline PosFormula lex_less_formula(int n) {
    // x <lex y  iff  OR_k (x_1 = y_1 & ... & x_{k-1} = y_{k-1} & x_k < y_k)
    std::vector<PosFormula> alts;
    for (int k = 0; k < n; ++k) {
        std::vector<PosFormula> parts;
        for (int j = 0; j < k; ++j)
            parts.push_back(PosFormula::atom(RelationSymbol::equal(), {Slot::param(0, j), Slot::param(1, j)}));
        parts.push_back(PosFormula::atom(RelationSymbol::less(), {Slot::param(0, k), Slot::param(1, k)}));
        alts.push_back(parts.size() == 1 ? parts[0] : PosFormula::both(std::move(parts)));
    }
    return alts.size() == 1 ? alts[0] : PosFormula::either(std::move(alts));
}

inline PosFormula tuple_equal_formula(int n) {
    std::vector<PosFormula> parts;
    for (int j = 0; j < n; ++j)
        parts.push_back(PosFormula::atom(RelationSymbol::equal(), {Slot::param(0, j), Slot::param(1, j)}));
    return parts.size() == 1 ? parts[0] : PosFormula::both(std::move(parts));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Domains

class ConcreteDomain {
public:
    enum class Kind { Z, N, NegZ, Q, AllenZ, LexZ };
    enum class ElementKind { Integer, Rational, IntegerPairInterval, IntegerTuple };

    /// "Z", "N", "negZ", "Q", "allenZ", "lexZ[n]".
    static ConcreteDomain by_name(const std::string& name) {
        if (name == "Z") return ConcreteDomain(Kind::Z, 1);
        if (name == "N") return ConcreteDomain(Kind::N, 1);
        if (name == "negZ") return ConcreteDomain(Kind::NegZ, 1);
        if (name == "Q") return ConcreteDomain(Kind::Q, 1);
        if (name == "allenZ") return ConcreteDomain(Kind::AllenZ, 2);
        if (name.rfind("lexZ[", 0) == 0 && name.back() == ']') {
            int n = 0;
            try {
                n = static_cast<int>(Rational::parse_int(name.substr(5, name.size() - 6)));
            } catch (const std::exception&) {
                throw DomainError("malformed domain name '" + name + "'");
            }
            if (n < 1 || n > 8) throw DomainError("lexZ width must be in [1,8]");
            return ConcreteDomain(Kind::LexZ, n);
        }
        throw DomainError("unknown domain '" + name + "' (expected Z, N, negZ, Q, allenZ or lexZ[n])");
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] std::string name() const {
        switch (kind_) {
            case Kind::Z: return "Z";
            case Kind::N: return "N";
            case Kind::NegZ: return "negZ";
            case Kind::Q: return "Q";
            case Kind::AllenZ: return "allenZ";
            case Kind::LexZ: return "lexZ[" + std::to_string(width_) + "]";
        }
        return {};
    }
    [[nodiscard]] ElementKind element_kind() const {
        switch (kind_) {
            case Kind::Q: return ElementKind::Rational;
            case Kind::AllenZ: return ElementKind::IntegerPairInterval;
            case Kind::LexZ: return ElementKind::IntegerTuple;
            default: return ElementKind::Integer;
        }
    }
    [[nodiscard]] bool is_numeric() const { return width_ == 1 && kind_ != Kind::LexZ; }

    /// Throws DomainError if `r` is not in this domain's signature.
    void check_symbol(const RelationSymbol& r) const {
        if (!supports(r)) throw DomainError("relation " + r.token() + " is not in the signature of " + name());
    }

    [[nodiscard]] bool supports(const RelationSymbol& r) const {
        switch (kind_) {
            case Kind::Z:
            case Kind::N:
            case Kind::NegZ:
                if (r.kind == RelKind::Constant) return r.constant.is_integer();
                return r.kind != RelKind::Interpreted;
            case Kind::Q: return r.kind == RelKind::Less || r.kind == RelKind::Equal || r.kind == RelKind::Constant;
            case Kind::AllenZ:
                return r.kind == RelKind::Interpreted && r.arity == 2 && !allen_canonical(r.name).empty();
            case Kind::LexZ:
                return r.kind == RelKind::Equal || (r.kind == RelKind::Interpreted && r.name == "ltlex" && r.arity == 2);
        }
        return false;
    }

    /// Whether `e` is an element of this domain.
    [[nodiscard]] bool contains(const Element& e) const {
        if (static_cast<int>(e.size()) != width_) return false;
        if (kind_ != Kind::Q)
            for (const auto& c : e)
                if (!c.is_integer()) return false;
        switch (kind_) {
            case Kind::N: return e[0] >= Rational(0);
            case Kind::NegZ: return e[0] < Rational(0);
            case Kind::AllenZ: return e[0] < e[1];
            default: return true;
        }
    }

    /// Truth of t ∈ I(r).
    [[nodiscard]] bool eval(const RelationSymbol& r, const std::vector<Element>& t) const {
        check_symbol(r);
        if (static_cast<int>(t.size()) != r.arity)
            throw DomainError("relation " + r.token() + " applied to " + std::to_string(t.size()) + " argument(s)");
        for (const auto& e : t)
            if (!contains(e)) throw DomainError("value " + format_element(e) + " is not an element of " + name());
        if (kind_ == Kind::AllenZ) {
            const auto f = detail::allen_endpoint_formula(allen_canonical(r.name));
            return eval_positive(f, t, {}, eval_base_relation);
        }
        if (kind_ == Kind::LexZ) {
            const auto f = r.kind == RelKind::Equal ? detail::tuple_equal_formula(width_) : detail::lex_less_formula(width_);
            return eval_positive(f, t, {}, eval_base_relation);
        }
        return eval_base_relation(r, t);
    }

    /// Positive existential definition of the complement of r.
    [[nodiscard]] NegationEntry negation(const RelationSymbol& r) const {
        check_symbol(r);
        const auto atom = [](RelationSymbol s, std::vector<Slot> a) { return PosFormula::atom(std::move(s), std::move(a)); };
        const Slot y1 = Slot::param(0), y2 = Slot::param(1), z1 = Slot::var(0);
        if (kind_ == Kind::AllenZ) {
            const std::string self = allen_canonical(r.name);
            std::vector<PosFormula> others;
            for (const auto& a : allen_relations())
                if (self != a.name) others.push_back(atom(RelationSymbol::interpreted(a.name, 2), {y1, y2}));
            return {0, PosFormula::either(std::move(others))};
        }
        if (kind_ == Kind::LexZ) {
            const auto ltlex = RelationSymbol::interpreted("ltlex", 2);
            if (r.kind == RelKind::Equal) return {0, PosFormula::either({atom(ltlex, {y1, y2}), atom(ltlex, {y2, y1})})};
            return {0, PosFormula::either({atom(ltlex, {y2, y1}), atom(RelationSymbol::equal(), {y1, y2})})};
        }
        switch (r.kind) {
            case RelKind::Equal:
                return {0, PosFormula::either({atom(RelationSymbol::less(), {y1, y2}), atom(RelationSymbol::less(), {y2, y1})})};
            case RelKind::Less:
                return {0, PosFormula::either({atom(RelationSymbol::less(), {y2, y1}), atom(RelationSymbol::equal(), {y1, y2})})};
            case RelKind::Constant:
                if (!contains({r.constant})) return {0, PosFormula::truth()};
                return {1, PosFormula::both({atom(r, {z1}), PosFormula::either({atom(RelationSymbol::less(), {y1, z1}),
                                                                               atom(RelationSymbol::less(), {z1, y1})})})};
            case RelKind::Modulo: {
                std::vector<PosFormula> alts;
                for (std::int64_t c = 0; c < r.modulus; ++c)
                    if (c != r.residue) alts.push_back(atom(RelationSymbol::modulo(c, r.modulus), {y1}));
                return {0, alts.size() == 1 ? alts[0] : PosFormula::either(std::move(alts))};
            }
            case RelKind::Interpreted: break;
        }
        throw DomainError("no negation entry for " + r.token() + " in " + name());
    }

    /// Existential interpretation into (Z, <, =) for the derived domains.
    [[nodiscard]] std::optional<ExistentialInterpretation> interpretation() const {
        if (kind_ == Kind::AllenZ) {
            ExistentialInterpretation in;
            in.tuple_width = 2;
            in.domain_formula = PosFormula::atom(RelationSymbol::less(), {Slot::param(0, 0), Slot::param(0, 1)});
            in.domain_total = false;
            for (const auto& a : allen_relations()) {
                in.relations[a.name] = {2, 0, detail::allen_endpoint_formula(a.name)};
                in.relations[a.alias] = {2, 0, detail::allen_endpoint_formula(a.name)};
            }
            return in;
        }
        if (kind_ == Kind::LexZ) {
            ExistentialInterpretation in;
            in.tuple_width = width_;
            in.domain_formula = PosFormula::truth();
            in.domain_total = true;
            in.relations["ltlex"] = {2, 0, detail::lex_less_formula(width_)};
            in.relations["eq"] = {2, 0, detail::tuple_equal_formula(width_)};
            return in;
        }
        return std::nullopt;
    }

    /// Symbols listed for documentation and random generation.
    [[nodiscard]] std::vector<RelationSymbol> named_symbols() const {
        std::vector<RelationSymbol> out;
        switch (kind_) {
            case Kind::AllenZ:
                for (const auto& a : allen_relations()) out.push_back(RelationSymbol::interpreted(a.name, 2));
                break;
            case Kind::LexZ:
                out = {RelationSymbol::interpreted("ltlex", 2), RelationSymbol::equal()};
                break;
            default: out = {RelationSymbol::less(), RelationSymbol::equal()}; break;
        }
        return out;
    }

private:
    ConcreteDomain(Kind k, int w) : kind_(k), width_(w) {}

    Kind kind_;
    int width_;
};

/// Key used to compare relation symbols across domains: Allen aliases map to
/// their canonical name.
inline RelationSymbol canonical_symbol(const ConcreteDomain& dom, RelationSymbol r) {
    if (dom.kind() == ConcreteDomain::Kind::AllenZ && r.kind == RelKind::Interpreted) {
        const auto c = allen_canonical(r.name);
        if (!c.empty()) r.name = c;
    }
    return r;
}

}  // namespace ctlz
