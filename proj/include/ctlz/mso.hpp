#pragma once

// MSO / WMSO+B formulas over relational signatures: AST, s-expression text
// format, capture-avoiding renaming, relativization and classification.
//
// Text format:
//   true | false
//   (exists x F) (forall x F) (existsset X F) (forallset X F) (B X F)
//   (in x X) (= x y) (not F) (and F...) (or F...) (implies F G)
//   (<relation> x ...)      e.g. (lt x y) (eq x y) (eqc[0] x) (mod[1,2] x) (succ_1 x y)

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctlz/error.hpp"

namespace ctlz {

class Mso {
public:
    enum class Kind { True, False, Atom, In, Eq, Not, And, Or, Implies, Exists, Forall, ExistsSet, ForallSet, Bound };

    Mso() : Mso(top()) {}

    static Mso top() {
        static const Mso t = make(Kind::True, {}, {}, {});
        return t;
    }
    static Mso bottom() {
        static const Mso f = make(Kind::False, {}, {}, {});
        return f;
    }
    static Mso atom(std::string rel, std::vector<std::string> args) {
        return make(Kind::Atom, std::move(rel), std::move(args), {});
    }
    static Mso in(std::string x, std::string set) { return make(Kind::In, {}, {std::move(x), std::move(set)}, {}); }
    static Mso eq(std::string x, std::string y) { return make(Kind::Eq, {}, {std::move(x), std::move(y)}, {}); }
    static Mso neg(Mso f) { return make(Kind::Not, {}, {}, {std::move(f)}); }
    static Mso conj(std::vector<Mso> fs) {
        if (fs.empty()) return top();
        if (fs.size() == 1) return fs[0];
        return make(Kind::And, {}, {}, std::move(fs));
    }
    static Mso disj(std::vector<Mso> fs) {
        if (fs.empty()) return bottom();
        if (fs.size() == 1) return fs[0];
        return make(Kind::Or, {}, {}, std::move(fs));
    }
    static Mso implies(Mso a, Mso b) { return make(Kind::Implies, {}, {}, {std::move(a), std::move(b)}); }
    static Mso exists(std::string x, Mso f) { return make(Kind::Exists, std::move(x), {}, {std::move(f)}); }
    static Mso forall(std::string x, Mso f) { return make(Kind::Forall, std::move(x), {}, {std::move(f)}); }
    static Mso exists_set(std::string x, Mso f) { return make(Kind::ExistsSet, std::move(x), {}, {std::move(f)}); }
    static Mso forall_set(std::string x, Mso f) { return make(Kind::ForallSet, std::move(x), {}, {std::move(f)}); }
    static Mso bound(std::string x, Mso f) { return make(Kind::Bound, std::move(x), {}, {std::move(f)}); }

    [[nodiscard]] Kind kind() const { return node_->kind; }
    /// Relation token for atoms, bound variable for quantifiers.
    [[nodiscard]] const std::string& name() const { return node_->name; }
    [[nodiscard]] const std::vector<std::string>& args() const { return node_->args; }
    [[nodiscard]] const std::vector<Mso>& kids() const { return node_->kids; }
    [[nodiscard]] const Mso& body() const { return node_->kids.at(0); }

    [[nodiscard]] bool is_quantifier() const {
        const Kind k = kind();
        return k == Kind::Exists || k == Kind::Forall || k == Kind::ExistsSet || k == Kind::ForallSet || k == Kind::Bound;
    }
    [[nodiscard]] bool is_set_quantifier() const {
        const Kind k = kind();
        return k == Kind::ExistsSet || k == Kind::ForallSet || k == Kind::Bound;
    }

    [[nodiscard]] const void* identity() const { return node_.get(); }

    friend bool operator==(const Mso& a, const Mso& b) {
        if (a.node_ == b.node_) return true;
        return a.kind() == b.kind() && a.name() == b.name() && a.args() == b.args() && a.kids() == b.kids();
    }

private:
    struct Node {
        Kind kind;
        std::string name;
        std::vector<std::string> args;
        std::vector<Mso> kids;
    };
    explicit Mso(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Mso make(Kind k, std::string name, std::vector<std::string> args, std::vector<Mso> kids) {
        return Mso(std::make_shared<const Node>(Node{k, std::move(name), std::move(args), std::move(kids)}));
    }
    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline const char* mso_keyword(Mso::Kind k) {
    switch (k) {
        case Mso::Kind::In: return "in";
        case Mso::Kind::Eq: return "=";
        case Mso::Kind::Not: return "not";
        case Mso::Kind::And: return "and";
        case Mso::Kind::Or: return "or";
        case Mso::Kind::Implies: return "implies";
        case Mso::Kind::Exists: return "exists";
        case Mso::Kind::Forall: return "forall";
        case Mso::Kind::ExistsSet: return "existsset";
        case Mso::Kind::ForallSet: return "forallset";
        case Mso::Kind::Bound: return "B";
        default: return "";
    }
}

inline void mso_print_flat(const Mso& f, std::string& out) {
    switch (f.kind()) {
        case Mso::Kind::True: out += "true"; return;
        case Mso::Kind::False: out += "false"; return;
        case Mso::Kind::Atom:
        case Mso::Kind::In:
        case Mso::Kind::Eq:
            out += '(';
            out += f.kind() == Mso::Kind::Atom ? f.name() : mso_keyword(f.kind());
            for (const auto& a : f.args()) out += " " + a;
            out += ')';
            return;
        default: break;
    }
    out += '(';
    out += mso_keyword(f.kind());
    if (f.is_quantifier()) out += " " + f.name();
    for (const auto& k : f.kids()) {
        out += ' ';
        mso_print_flat(k, out);
    }
    out += ')';
}

inline void mso_print_pretty(const Mso& f, int indent, std::string& out) {
    std::string flat;
    mso_print_flat(f, flat);
    if (flat.size() + indent <= 100 || f.kids().empty()) {
        out += flat;
        return;
    }
    out += '(';
    out += mso_keyword(f.kind());
    if (f.is_quantifier()) out += " " + f.name();
    for (const auto& k : f.kids()) {
        out += '\n';
        out.append(indent + 2, ' ');
        mso_print_pretty(k, indent + 2, out);
    }
    out += ')';
}

}  // namespace detail

/// Single-line rendering.
inline std::string to_string(const Mso& f) {
    std::string out;
    detail::mso_print_flat(f, out);
    return out;
}

/// Indented rendering: a subterm stays on one line when it fits in 100 columns.
inline std::string to_pretty_string(const Mso& f) {
    std::string out;
    detail::mso_print_pretty(f, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class MsoParser {
public:
    explicit MsoParser(std::string_view s) : src_(s) {}

    Mso parse_all() {
        Mso f = parse();
        skip();
        if (pos_ < src_.size()) fail("trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& m) const { throw ParseError(m, line_, col_); }

    void skip() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ';') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }
    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    std::string token() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) && src_[pos_] != '(' &&
               src_[pos_] != ')')
            bump();
        if (start == pos_) fail("expected a name");
        return std::string(src_.substr(start, pos_ - start));
    }
    void expect(char c) {
        skip();
        if (pos_ >= src_.size() || src_[pos_] != c) fail(std::string("expected '") + c + "'");
        bump();
    }
    bool at(char c) {
        skip();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    Mso parse() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        if (!at('(')) {
            const std::string t = token();
            if (t == "true") return Mso::top();
            if (t == "false") return Mso::bottom();
            fail("unexpected '" + t + "'");
        }
        expect('(');
        const std::string head = token();
        Mso out;
        if (head == "exists" || head == "forall" || head == "existsset" || head == "forallset" || head == "B") {
            const std::string v = token();
            Mso b = parse();
            if (head == "exists") out = Mso::exists(v, b);
            else if (head == "forall") out = Mso::forall(v, b);
            else if (head == "existsset") out = Mso::exists_set(v, b);
            else if (head == "forallset") out = Mso::forall_set(v, b);
            else out = Mso::bound(v, b);
        } else if (head == "not") {
            out = Mso::neg(parse());
        } else if (head == "implies") {
            Mso a = parse();
            out = Mso::implies(a, parse());
        } else if (head == "and" || head == "or") {
            std::vector<Mso> kids;
            while (!at(')')) kids.push_back(parse());
            if (kids.size() < 2) fail("'" + head + "' needs at least two operands");
            out = head == "and" ? Mso::conj(std::move(kids)) : Mso::disj(std::move(kids));
        } else if (head == "in" || head == "=") {
            const std::string a = token();
            const std::string b = token();
            out = head == "in" ? Mso::in(a, b) : Mso::eq(a, b);
        } else {
            std::vector<std::string> args;
            while (!at(')')) args.push_back(token());
            if (args.empty()) fail("relation atom without arguments");
            out = Mso::atom(head, std::move(args));
        }
        expect(')');
        return out;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace detail

inline Mso parse_mso(std::string_view text) { return detail::MsoParser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Variables, renaming, relativization

struct MsoFreeVars {
    std::set<std::string> fo;
    std::set<std::string> so;
};

inline void collect_free(const Mso& f, std::set<std::string>& bound_fo, std::set<std::string>& bound_so, MsoFreeVars& out) {
    switch (f.kind()) {
        case Mso::Kind::True:
        case Mso::Kind::False: return;
        case Mso::Kind::Atom:
        case Mso::Kind::Eq:
            for (const auto& a : f.args())
                if (!bound_fo.count(a)) out.fo.insert(a);
            return;
        case Mso::Kind::In:
            if (!bound_fo.count(f.args()[0])) out.fo.insert(f.args()[0]);
            if (!bound_so.count(f.args()[1])) out.so.insert(f.args()[1]);
            return;
        default: break;
    }
    if (f.is_quantifier()) {
        auto& scope = f.is_set_quantifier() ? bound_so : bound_fo;
        const bool fresh = scope.insert(f.name()).second;
        collect_free(f.body(), bound_fo, bound_so, out);
        if (fresh) scope.erase(f.name());
        return;
    }
    for (const auto& k : f.kids()) collect_free(k, bound_fo, bound_so, out);
}

inline MsoFreeVars free_vars(const Mso& f) {
    std::set<std::string> bf, bs;
    MsoFreeVars out;
    collect_free(f, bf, bs, out);
    return out;
}

/// Fresh-name source shared by the formula builders.
class NameGen {
public:
    explicit NameGen(std::string prefix = "v") : prefix_(std::move(prefix)) {}
    std::string fresh(const std::string& hint = "") { return hint + prefix_ + std::to_string(next_++); }

private:
    std::string prefix_;
    int next_ = 0;
};

/// Capture-avoiding renaming of free first-order (and set) variables.
inline Mso rename(const Mso& f, const std::map<std::string, std::string>& fo, const std::map<std::string, std::string>& so,
                  NameGen& names) {
    const auto sub = [](const std::map<std::string, std::string>& m, const std::string& v) {
        const auto it = m.find(v);
        return it == m.end() ? v : it->second;
    };
    switch (f.kind()) {
        case Mso::Kind::True:
        case Mso::Kind::False: return f;
        case Mso::Kind::Atom: {
            std::vector<std::string> args;
            for (const auto& a : f.args()) args.push_back(sub(fo, a));
            return Mso::atom(f.name(), std::move(args));
        }
        case Mso::Kind::Eq: return Mso::eq(sub(fo, f.args()[0]), sub(fo, f.args()[1]));
        case Mso::Kind::In: return Mso::in(sub(fo, f.args()[0]), sub(so, f.args()[1]));
        default: break;
    }
    if (f.is_quantifier()) {
        const bool set = f.is_set_quantifier();
        auto fo2 = fo;
        auto so2 = so;
        auto& scope = set ? so2 : fo2;
        scope.erase(f.name());
        std::string v = f.name();
        // Rename the binder if it would capture a substituted name.
        bool captures = false;
        for (const auto& [from, to] : scope)
            if (to == v) captures = true;
        if (captures) {
            const std::string nv = names.fresh(set ? "S" : "x");
            scope[v] = nv;
            v = nv;
        }
        Mso b = rename(f.body(), fo2, so2, names);
        switch (f.kind()) {
            case Mso::Kind::Exists: return Mso::exists(v, b);
            case Mso::Kind::Forall: return Mso::forall(v, b);
            case Mso::Kind::ExistsSet: return Mso::exists_set(v, b);
            case Mso::Kind::ForallSet: return Mso::forall_set(v, b);
            default: return Mso::bound(v, b);
        }
    }
    std::vector<Mso> kids;
    for (const auto& k : f.kids()) kids.push_back(rename(k, fo, so, names));
    switch (f.kind()) {
        case Mso::Kind::Not: return Mso::neg(kids[0]);
        case Mso::Kind::And: return Mso::conj(std::move(kids));
        case Mso::Kind::Or: return Mso::disj(std::move(kids));
        default: return Mso::implies(kids[0], kids[1]);
    }
}

/// A formula with one distinguished free first-order variable.
struct MsoUnary {
    Mso body;
    std::string var;

    [[nodiscard]] Mso at(const std::string& x, NameGen& names) const {
        return x == var ? body : rename(body, {{var, x}}, {}, names);
    }
};

/// A formula with two distinguished free first-order variables.
struct MsoBinary {
    Mso body;
    std::string x, y;

    [[nodiscard]] Mso at(const std::string& a, const std::string& b, NameGen& names) const {
        if (a == x && b == y) return body;
        return rename(body, {{x, a}, {y, b}}, {}, names);
    }
};

/// ∀z (z ∈ X → guard(z)).
inline Mso subset_of(const std::string& set, const MsoUnary& guard, NameGen& names) {
    const std::string z = names.fresh("z");
    return Mso::forall(z, Mso::implies(Mso::in(z, set), guard.at(z, names)));
}

/// Restricts every quantifier of `f` to the extension of `guard`.
inline Mso relativize(const Mso& f, const MsoUnary& guard, NameGen& names) {
    switch (f.kind()) {
        case Mso::Kind::True:
        case Mso::Kind::False:
        case Mso::Kind::Atom:
        case Mso::Kind::In:
        case Mso::Kind::Eq: return f;
        case Mso::Kind::Not: return Mso::neg(relativize(f.body(), guard, names));
        case Mso::Kind::And:
        case Mso::Kind::Or: {
            std::vector<Mso> kids;
            for (const auto& k : f.kids()) kids.push_back(relativize(k, guard, names));
            return f.kind() == Mso::Kind::And ? Mso::conj(std::move(kids)) : Mso::disj(std::move(kids));
        }
        case Mso::Kind::Implies:
            return Mso::implies(relativize(f.kids()[0], guard, names), relativize(f.kids()[1], guard, names));
        case Mso::Kind::Exists:
            return Mso::exists(f.name(), Mso::conj({guard.at(f.name(), names), relativize(f.body(), guard, names)}));
        case Mso::Kind::Forall:
            return Mso::forall(f.name(), Mso::implies(guard.at(f.name(), names), relativize(f.body(), guard, names)));
        case Mso::Kind::ExistsSet:
            return Mso::exists_set(f.name(),
                                   Mso::conj({subset_of(f.name(), guard, names), relativize(f.body(), guard, names)}));
        case Mso::Kind::ForallSet:
            return Mso::forall_set(f.name(),
                                   Mso::implies(subset_of(f.name(), guard, names), relativize(f.body(), guard, names)));
        case Mso::Kind::Bound:
            return Mso::bound(f.name(), Mso::conj({subset_of(f.name(), guard, names), relativize(f.body(), guard, names)}));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Classification

enum class MsoClass { Mso, WmsoB, Boolean };

inline std::string class_name(MsoClass c) {
    switch (c) {
        case MsoClass::Mso: return "MSO";
        case MsoClass::WmsoB: return "WMSO+B";
        case MsoClass::Boolean: return "Bool(MSO,WMSO+B)";
    }
    return {};
}

inline bool contains_bound(const Mso& f) {
    if (f.kind() == Mso::Kind::Bound) return true;
    return std::any_of(f.kids().begin(), f.kids().end(), contains_bound);
}

/// MSO when no B occurs; a boolean connective over parts of different classes
/// is a boolean combination; anything else containing B is WMSO+B.
inline MsoClass classify(const Mso& f) {
    if (!contains_bound(f)) return MsoClass::Mso;
    switch (f.kind()) {
        case Mso::Kind::Not: return classify(f.body());
        case Mso::Kind::And:
        case Mso::Kind::Or:
        case Mso::Kind::Implies: {
            std::set<MsoClass> cs;
            for (const auto& k : f.kids()) cs.insert(classify(k));
            if (cs.size() == 1) return *cs.begin();
            return MsoClass::Boolean;
        }
        default: return MsoClass::WmsoB;
    }
}

/// Number of AST nodes (shared subtrees counted per occurrence).
inline std::size_t mso_size(const Mso& f) {
    std::size_t n = 1;
    for (const auto& k : f.kids()) n += mso_size(k);
    return n;
}

}  // namespace ctlz
