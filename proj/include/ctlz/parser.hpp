#pragma once

// Concrete syntax for formulas and relation tokens.
//
//   state  := PROP | true | false | "~" state | state "&" state | state "|" state
//           | "E" path | "A" path | "(" state ")"
//   path   := state | "~" path | path "&" path | path "|" path | "X" path
//           | path "U" path | path "R" path | "F" path | "G" path | constraint
//   constraint := REL "(" term {"," term} ")"
//   term   := VAR | "X^" INT VAR
//   REL    := "lt" | "eq" | "eqc[" NUM "]" | "mod[" INT "," INT "]" | IDENT
//
// Precedence: unary > U/R (right-assoc) > & > | (left-assoc).
// F and G are desugared to (true U .) and (false R .).

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"

namespace ctlz {

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline bool is_keyword(std::string_view s) {
    return s == "E" || s == "A" || s == "X" || s == "U" || s == "R" || s == "F" || s == "G" || s == "true" ||
           s == "false";
}

class FormulaLexer {
public:
    enum class Kind { Ident, Int, LParen, RParen, LBracket, RBracket, Comma, Tilde, Amp, Bar, Caret, Slash, Minus, End };
    struct Token {
        Kind kind;
        std::string text;
        int line;
        int column;
    };

    explicit FormulaLexer(std::string_view src) : src_(src) { advance(); }

    [[nodiscard]] const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.column = col_;
        tok_.text.clear();
        if (pos_ >= src_.size()) {
            tok_.kind = Kind::End;
            return;
        }
        const char c = src_[pos_];
        if (is_ident_start(c)) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
            tok_.kind = Kind::Ident;
            tok_.text = std::string(src_.substr(start, pos_ - start));
            col_ += static_cast<int>(pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            tok_.kind = Kind::Int;
            tok_.text = std::string(src_.substr(start, pos_ - start));
            col_ += static_cast<int>(pos_ - start);
            return;
        }
        Kind k;
        switch (c) {
            case '(': k = Kind::LParen; break;
            case ')': k = Kind::RParen; break;
            case '[': k = Kind::LBracket; break;
            case ']': k = Kind::RBracket; break;
            case ',': k = Kind::Comma; break;
            case '~':
            case '!': k = Kind::Tilde; break;
            case '&': k = Kind::Amp; break;
            case '|': k = Kind::Bar; break;
            case '^': k = Kind::Caret; break;
            case '/': k = Kind::Slash; break;
            case '-': k = Kind::Minus; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
        tok_.kind = k;
        tok_.text = std::string(1, c);
        ++pos_;
        ++col_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_{};
};

class FormulaParser {
public:
    using Kind = FormulaLexer::Kind;

    FormulaParser(std::string_view src, bool allow_reserved) : lex_(src), allow_reserved_(allow_reserved) {}

    Formula parse_top() {
        Formula f = parse_or();
        if (lex_.peek().kind != Kind::End) fail("unexpected '" + lex_.peek().text + "'");
        return f;
    }

    RelationSymbol parse_relation_only(int arity_hint) {
        const auto t = expect_ident("relation name");
        RelationSymbol r = relation_after_name(t, arity_hint);
        if (lex_.peek().kind != Kind::End) fail("unexpected '" + lex_.peek().text + "' after relation");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, lex_.peek().line, lex_.peek().column);
    }
    [[noreturn]] static void fail_at(const FormulaLexer::Token& t, const std::string& msg) {
        throw ParseError(msg, t.line, t.column);
    }

    void expect(Kind k, const char* what) {
        if (lex_.peek().kind != k) fail(std::string("expected ") + what);
        lex_.take();
    }

    FormulaLexer::Token expect_ident(const char* what) {
        if (lex_.peek().kind != Kind::Ident) fail(std::string("expected ") + what);
        return lex_.take();
    }

    std::int64_t parse_signed_int(const char* what) {
        bool neg = false;
        if (lex_.peek().kind == Kind::Minus) {
            lex_.take();
            neg = true;
        }
        if (lex_.peek().kind != Kind::Int) fail(std::string("expected ") + what);
        const auto t = lex_.take();
        try {
            const std::int64_t v = Rational::parse_int(t.text);
            return neg ? -v : v;
        } catch (const std::exception&) {
            fail_at(t, "integer out of range");
        }
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (lex_.peek().kind == Kind::Bar) {
            lex_.take();
            f = Formula::disj(f, parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_temporal();
        while (lex_.peek().kind == Kind::Amp) {
            lex_.take();
            f = Formula::conj(f, parse_temporal());
        }
        return f;
    }

    Formula parse_temporal() {
        Formula f = parse_unary();
        const auto& t = lex_.peek();
        if (t.kind == Kind::Ident && (t.text == "U" || t.text == "R")) {
            const bool until = t.text == "U";
            lex_.take();
            Formula rhs = parse_temporal();
            return until ? Formula::until(f, rhs) : Formula::release(f, rhs);
        }
        return f;
    }

    Formula parse_unary() {
        const auto t = lex_.peek();
        if (t.kind == Kind::Tilde) {
            lex_.take();
            return Formula::neg(parse_unary());
        }
        if (t.kind == Kind::LParen) {
            lex_.take();
            Formula f = parse_or();
            expect(Kind::RParen, "')'");
            return f;
        }
        if (t.kind != Kind::Ident) fail(t.kind == Kind::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
        if (t.text == "E" || t.text == "A" || t.text == "X" || t.text == "F" || t.text == "G") {
            lex_.take();
            Formula sub = parse_unary();
            if (t.text == "E") return Formula::exists(sub);
            if (t.text == "A") return Formula::all(sub);
            if (t.text == "X") return Formula::next(sub);
            if (t.text == "F") return Formula::until(Formula::top(), sub);
            return Formula::release(Formula::bottom(), sub);
        }
        if (t.text == "true") {
            lex_.take();
            return Formula::top();
        }
        if (t.text == "false") {
            lex_.take();
            return Formula::bottom();
        }
        if (t.text == "U" || t.text == "R") fail("unexpected '" + t.text + "'");
        lex_.take();
        if (!allow_reserved_ && is_reserved_identifier(t.text))
            fail_at(t, "identifiers starting with '__' are reserved");
        const Kind next = lex_.peek().kind;
        if (next == Kind::LParen || next == Kind::LBracket) return parse_constraint(t);
        return Formula::prop(t.text);
    }

    RelationSymbol relation_after_name(const FormulaLexer::Token& name, int arity) {
        if (name.text == "lt" && lex_.peek().kind != Kind::LBracket) return RelationSymbol::less();
        if (name.text == "eq" && lex_.peek().kind != Kind::LBracket) return RelationSymbol::equal();
        if (name.text == "eqc") {
            expect(Kind::LBracket, "'[' after eqc");
            const std::int64_t n = parse_signed_int("constant");
            std::int64_t d = 1;
            if (lex_.peek().kind == Kind::Slash) {
                lex_.take();
                d = parse_signed_int("denominator");
                if (d <= 0) fail("denominator must be positive");
            }
            expect(Kind::RBracket, "']'");
            return RelationSymbol::constant_eq(Rational(n, d));
        }
        if (name.text == "mod") {
            expect(Kind::LBracket, "'[' after mod");
            const auto at = lex_.peek();
            const std::int64_t a = parse_signed_int("residue");
            expect(Kind::Comma, "','");
            const std::int64_t b = parse_signed_int("modulus");
            expect(Kind::RBracket, "']'");
            try {
                return RelationSymbol::modulo(a, b);
            } catch (const DomainError& e) {
                fail_at(at, e.what());
            }
        }
        if (lex_.peek().kind == Kind::LBracket) fail("unexpected '[' after relation '" + name.text + "'");
        if (is_keyword(name.text)) fail_at(name, "keyword '" + name.text + "' used as relation name");
        return RelationSymbol::interpreted(name.text, arity);
    }

    Formula parse_constraint(const FormulaLexer::Token& name) {
        RelationSymbol rel = relation_after_name(name, 0);
        expect(Kind::LParen, "'('");
        std::vector<Term> args;
        args.push_back(parse_term());
        while (lex_.peek().kind == Kind::Comma) {
            lex_.take();
            args.push_back(parse_term());
        }
        expect(Kind::RParen, "')'");
        if (rel.kind == RelKind::Interpreted) rel.arity = static_cast<int>(args.size());
        if (static_cast<int>(args.size()) != rel.arity)
            fail_at(name, "relation " + rel.token() + " expects " + std::to_string(rel.arity) + " argument(s), got " +
                              std::to_string(args.size()));
        return Formula::atom(Constraint{rel, std::move(args)});
    }

    Term parse_term() {
        const auto t = expect_ident("variable");
        if (t.text == "X") {
            int offset = 1;
            if (lex_.peek().kind == Kind::Caret) {
                lex_.take();
                if (lex_.peek().kind != Kind::Int) fail("expected offset after 'X^'");
                const auto o = lex_.take();
                if (o.text.size() > 6) fail_at(o, "offset too large");
                offset = std::stoi(o.text);
            }
            const auto v = expect_ident("variable");
            check_var(v);
            return Term{offset, v.text};
        }
        check_var(t);
        return Term{0, t.text};
    }

    void check_var(const FormulaLexer::Token& v) const {
        if (is_keyword(v.text)) fail_at(v, "keyword '" + v.text + "' used as variable");
        if (!allow_reserved_ && is_reserved_identifier(v.text)) fail_at(v, "identifiers starting with '__' are reserved");
    }

    FormulaLexer lex_;
    bool allow_reserved_ = false;
};

}  // namespace detail

/// Parses any formula (state or path). Reserved "__" identifiers are rejected
/// unless `allow_reserved` is set (for reading back rewriter output).
inline Formula parse_path_formula(std::string_view text, bool allow_reserved = false) {
    return detail::FormulaParser(text, allow_reserved).parse_top();
}

/// Parses a state formula; a top-level path formula is rejected.
inline Formula parse_formula(std::string_view text, bool allow_reserved = false) {
    Formula f = parse_path_formula(text, allow_reserved);
    if (!is_state_formula(f))
        throw ParseError("not a state formula (wrap path formulas in E or A)", 1, 1);
    return f;
}

/// Parses a relation token such as "lt", "eqc[-3]", "mod[1,2]" or an interpreted name.
inline RelationSymbol parse_relation_token(std::string_view text, int interpreted_arity = 2) {
    return detail::FormulaParser(text, false).parse_relation_only(interpreted_arity);
}

// ---------------------------------------------------------------------------
// Printing

inline std::string to_string(const Term& t) {
    return t.offset == 0 ? t.var : "X^" + std::to_string(t.offset) + " " + t.var;
}

inline std::string to_string(const Constraint& c) {
    std::string out = c.rel.token() + "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(c.args[i]);
    }
    return out + ")";
}

namespace detail {

inline int precedence(Op op) {
    switch (op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        case Op::Until:
        case Op::Release: return 3;
        default: return 4;
    }
}

inline void print(const Formula& f, int min_prec, std::string& out) {
    const int p = precedence(f.op());
    const bool paren = p < min_prec;
    if (paren) out += '(';
    switch (f.op()) {
        case Op::True: out += "true"; break;
        case Op::False: out += "false"; break;
        case Op::Prop: out += f.prop_name(); break;
        case Op::Atom: out += to_string(f.constraint()); break;
        case Op::Not:
            out += '~';
            print(f.sub(), 4, out);
            break;
        case Op::Exists:
        case Op::All:
        case Op::Next:
            out += f.op() == Op::Exists ? "E " : f.op() == Op::All ? "A " : "X ";
            print(f.sub(), 4, out);
            break;
        case Op::And:
        case Op::Or:
            print(f.lhs(), p, out);
            out += f.op() == Op::And ? " & " : " | ";
            print(f.rhs(), p + 1, out);
            break;
        case Op::Until:
        case Op::Release:
            print(f.lhs(), p + 1, out);
            out += f.op() == Op::Until ? " U " : " R ";
            print(f.rhs(), p, out);
            break;
    }
    if (paren) out += ')';
}

}  // namespace detail

/// Minimal-parenthesis rendering that parses back to the same tree.
inline std::string to_string(const Formula& f) {
    std::string out;
    detail::print(f, 0, out);
    return out;
}

}  // namespace ctlz
