#pragma once

// Finite relational structures over a finite subsignature.
//
// Text format:
//
//   # comment
//   ELEMENTS
//   a b c
//   RELATION lt
//   a b
//   b c
//   RELATION eqc[0]
//   a
//
// Element ids are whitespace-separated tokens; each RELATION section lists one
// tuple per line.

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/parser.hpp"

namespace ctlz {

using Tuple = std::vector<int>;

class SigmaStructure {
public:
    SigmaStructure() = default;
    explicit SigmaStructure(std::vector<std::string> names) {
        for (auto& n : names) add_element(std::move(n));
    }

    int add_element(std::string name) {
        if (index_.count(name)) throw ModelError("duplicate element '" + name + "'");
        const int id = static_cast<int>(names_.size());
        index_.emplace(name, id);
        names_.push_back(std::move(name));
        return id;
    }

    [[nodiscard]] int size() const { return static_cast<int>(names_.size()); }
    [[nodiscard]] const std::vector<std::string>& elements() const { return names_; }
    [[nodiscard]] const std::string& name(int i) const { return names_.at(i); }
    [[nodiscard]] int index_of(const std::string& n) const {
        const auto it = index_.find(n);
        if (it == index_.end()) throw ModelError("unknown element '" + n + "'");
        return it->second;
    }
    [[nodiscard]] bool has_element(const std::string& n) const { return index_.count(n) != 0; }

    /// Declares `r` with no tuples (keeps it in the signature).
    void declare(const RelationSymbol& r) { rels_[r]; }

    void add(const RelationSymbol& r, Tuple t) {
        if (static_cast<int>(t.size()) != r.arity)
            throw ModelError("tuple of length " + std::to_string(t.size()) + " for relation " + r.token() +
                             " of arity " + std::to_string(r.arity));
        for (int e : t)
            if (e < 0 || e >= size()) throw ModelError("tuple references element index out of range");
        rels_[r].insert(std::move(t));
    }

    [[nodiscard]] const std::map<RelationSymbol, std::set<Tuple>>& relations() const { return rels_; }

    [[nodiscard]] const std::set<Tuple>& tuples(const RelationSymbol& r) const {
        static const std::set<Tuple> empty;
        const auto it = rels_.find(r);
        return it == rels_.end() ? empty : it->second;
    }

    [[nodiscard]] bool holds(const RelationSymbol& r, const Tuple& t) const { return tuples(r).count(t) != 0; }

    /// Signature in use: every declared relation symbol.
    [[nodiscard]] std::set<RelationSymbol> signature() const {
        std::set<RelationSymbol> out;
        for (const auto& [r, _] : rels_) out.insert(r);
        return out;
    }

    /// Substructure induced by `keep` (indices into elements, order preserved).
    [[nodiscard]] SigmaStructure induced(const std::vector<int>& keep) const {
        SigmaStructure out;
        std::vector<int> remap(size(), -1);
        for (int e : keep) remap[e] = out.add_element(names_[e]);
        for (const auto& [r, ts] : rels_) {
            out.declare(r);
            for (const auto& t : ts) {
                Tuple nt;
                bool inside = true;
                for (int e : t) {
                    if (remap[e] < 0) {
                        inside = false;
                        break;
                    }
                    nt.push_back(remap[e]);
                }
                if (inside) out.add(r, std::move(nt));
            }
        }
        return out;
    }

    friend bool operator==(const SigmaStructure& a, const SigmaStructure& b) {
        return a.names_ == b.names_ && a.rels_ == b.rels_;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::map<RelationSymbol, std::set<Tuple>> rels_;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::string strip_comment(const std::string& line) {
    const auto h = line.find('#');
    return h == std::string::npos ? line : line.substr(0, h);
}

inline void check_identifier(const std::string& id, int line) {
    if (id.empty()) throw ParseError("empty identifier", line, 1);
    if (is_reserved_identifier(id)) throw ParseError("identifiers starting with '__' are reserved: " + id, line, 1);
}

}  // namespace detail

/// Parses the structure text format; reserved "__" element ids are rejected
/// unless `allow_reserved`.
inline SigmaStructure parse_structure(const std::string& text, bool allow_reserved = false) {
    SigmaStructure s;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    enum class Section { None, Elements, Relation } section = Section::None;
    RelationSymbol current;
    bool current_set = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto toks = detail::split_ws(detail::strip_comment(raw));
        if (toks.empty()) continue;
        if (toks[0] == "ELEMENTS") {
            if (toks.size() != 1) throw ParseError("ELEMENTS takes no arguments", line_no, 1);
            section = Section::Elements;
            continue;
        }
        if (toks[0] == "RELATION") {
            if (toks.size() != 2 && toks.size() != 3)
                throw ParseError("expected 'RELATION <symbol> [arity]'", line_no, 1);
            const int arity = toks.size() == 3 ? std::stoi(toks[2]) : 2;
            try {
                current = parse_relation_token(toks[1], arity);
            } catch (const ParseError& e) {
                throw ParseError(std::string("bad relation symbol: ") + e.what(), line_no, 10);
            }
            current_set = true;
            s.declare(current);
            section = Section::Relation;
            continue;
        }
        switch (section) {
            case Section::None: throw ParseError("content before ELEMENTS", line_no, 1);
            case Section::Elements:
                for (const auto& t : toks) {
                    if (!allow_reserved) detail::check_identifier(t, line_no);
                    if (s.has_element(t)) throw ParseError("duplicate element '" + t + "'", line_no, 1);
                    s.add_element(t);
                }
                break;
            case Section::Relation: {
                if (!current_set) throw ParseError("tuple outside RELATION", line_no, 1);
                if (static_cast<int>(toks.size()) != current.arity)
                    throw ParseError("tuple arity " + std::to_string(toks.size()) + " does not match relation " +
                                         current.token() + " of arity " + std::to_string(current.arity),
                                     line_no, 1);
                Tuple t;
                for (const auto& e : toks) {
                    if (!s.has_element(e)) throw ParseError("unknown element '" + e + "'", line_no, 1);
                    t.push_back(s.index_of(e));
                }
                s.add(current, std::move(t));
                break;
            }
        }
    }
    return s;
}

inline std::string format_structure(const SigmaStructure& s) {
    std::string out = "ELEMENTS\n";
    for (const auto& n : s.elements()) out += n + "\n";
    for (const auto& [r, ts] : s.relations()) {
        out += "RELATION " + r.token();
        if (r.kind == RelKind::Interpreted && r.arity != 2) out += " " + std::to_string(r.arity);
        out += "\n";
        for (const auto& t : ts) {
            for (std::size_t i = 0; i < t.size(); ++i) out += (i ? " " : "") + s.name(t[i]);
            out += "\n";
        }
    }
    return out;
}

}  // namespace ctlz
