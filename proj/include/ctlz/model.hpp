#pragma once

// Finite constraint Kripke structures (graphs with total edge relation, or
// finite tree truncations), their text format, the abstraction C^a and the
// constraint graph G_T of a labeled tree.
//
// Text format:
//
//   SHAPE graph            | SHAPE tree <branching> <depth>
//   VARS x y
//   NODES                  # one id per line (tree: optional, words over 1..d, root "eps")
//   a
//   EDGES                  # "src dst" (tree: optional, must match the tree edges)
//   a a
//   LABELS                 # "node prop..."
//   a p q
//   REGISTERS              # "node var value", value: 5 | -1/2 | (0,3)
//   a x 3

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctlz/domain.hpp"
#include "ctlz/error.hpp"
#include "ctlz/rewrite.hpp"
#include "ctlz/structure.hpp"

namespace ctlz {

class ConstraintKripke {
public:
    enum class Shape { Graph, Tree };

    ConstraintKripke() = default;

    /// Empty graph-shaped model over `vars`.
    explicit ConstraintKripke(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    /// Full tree of the given branching and depth, root "eps"; registers unset.
    static ConstraintKripke tree(int branching, int depth, std::vector<std::string> vars) {
        if (branching < 1 || branching > 9) throw ModelError("tree branching must be in [1,9]");
        if (depth < 0) throw ModelError("tree depth must be nonnegative");
        ConstraintKripke m(std::move(vars));
        m.shape_ = Shape::Tree;
        m.branching_ = branching;
        m.depth_ = depth;
        std::vector<std::string> level = {""};
        m.add_node("eps");
        for (int k = 1; k <= depth; ++k) {
            std::vector<std::string> next;
            for (const auto& w : level)
                for (int i = 1; i <= branching; ++i) next.push_back(w + static_cast<char>('0' + i));
            for (const auto& w : next) {
                const int v = m.add_node(w);
                m.add_edge(m.index_of(parent_word(w)), v);
            }
            level = std::move(next);
        }
        return m;
    }

    int add_node(const std::string& id) {
        if (index_.count(id)) throw ModelError("duplicate node id '" + id + "'");
        const int v = static_cast<int>(nodes_.size());
        index_.emplace(id, v);
        nodes_.push_back(id);
        succ_.emplace_back();
        labels_.emplace_back();
        regs_.emplace_back(vars_.size());
        return v;
    }
    void add_edge(int u, int v) {
        if (std::find(succ_.at(u).begin(), succ_[u].end(), v) == succ_[u].end()) succ_[u].push_back(v);
    }
    void add_label(int v, const std::string& p) { labels_.at(v).insert(p); }
    void set_register(int v, int var, Element e) { regs_.at(v).at(var) = std::move(e); }
    void set_register(int v, const std::string& var, Element e) { set_register(v, var_index(var), std::move(e)); }

    [[nodiscard]] Shape shape() const { return shape_; }
    [[nodiscard]] int branching() const { return branching_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] const std::vector<std::string>& nodes() const { return nodes_; }
    [[nodiscard]] const std::string& node(int v) const { return nodes_.at(v); }
    [[nodiscard]] const std::vector<std::string>& vars() const { return vars_; }
    [[nodiscard]] const std::vector<int>& successors(int v) const { return succ_.at(v); }
    [[nodiscard]] const std::set<std::string>& labels(int v) const { return labels_.at(v); }
    [[nodiscard]] bool has_label(int v, const std::string& p) const { return labels_.at(v).count(p) != 0; }

    [[nodiscard]] int index_of(const std::string& id) const {
        const auto it = index_.find(id);
        if (it == index_.end()) throw ModelError("unknown node '" + id + "'");
        return it->second;
    }
    [[nodiscard]] bool has_node(const std::string& id) const { return index_.count(id) != 0; }
    [[nodiscard]] int var_index(const std::string& x) const {
        const auto it = std::find(vars_.begin(), vars_.end(), x);
        if (it == vars_.end()) throw ModelError("undeclared variable '" + x + "'");
        return static_cast<int>(it - vars_.begin());
    }
    [[nodiscard]] bool has_var(const std::string& x) const {
        return std::find(vars_.begin(), vars_.end(), x) != vars_.end();
    }

    [[nodiscard]] const Element& reg(int v, int var) const {
        const auto& r = regs_.at(v).at(var);
        if (!r) throw ModelError("missing register value for node '" + nodes_[v] + "' variable '" + vars_[var] + "'");
        return *r;
    }
    [[nodiscard]] bool has_reg(int v, int var) const { return regs_.at(v).at(var).has_value(); }

    /// Tree word of node v ("" for the root).
    [[nodiscard]] std::string word(int v) const { return nodes_.at(v) == "eps" ? std::string() : nodes_[v]; }
    [[nodiscard]] int node_of_word(const std::string& w) const { return index_of(w.empty() ? "eps" : w); }

    static std::string parent_word(const std::string& w) { return w.size() <= 1 ? "eps" : w.substr(0, w.size() - 1); }

    /// Checks shape invariants; `require_registers` demands γ total on nodes × vars.
    void validate(bool require_registers = true) const {
        if (nodes_.empty()) throw ModelError("model has no nodes");
        for (int v = 0; v < size(); ++v) {
            for (int w : succ_[v])
                if (w < 0 || w >= size()) throw ModelError("dangling edge endpoint from '" + nodes_[v] + "'");
            if (shape_ == Shape::Graph && succ_[v].empty()) throw ModelError("node '" + nodes_[v] + "' has no successor");
            if (require_registers)
                for (std::size_t x = 0; x < vars_.size(); ++x)
                    if (!regs_[v][x])
                        throw ModelError("missing register value for node '" + nodes_[v] + "' variable '" + vars_[x] + "'");
        }
        if (shape_ == Shape::Tree) {
            int expected = 0, level = 1;
            for (int k = 0; k <= depth_; ++k, level *= branching_) expected += level;
            if (size() != expected)
                throw ModelError("tree of branching " + std::to_string(branching_) + " and depth " +
                                 std::to_string(depth_) + " needs " + std::to_string(expected) + " nodes, found " +
                                 std::to_string(size()));
            for (int v = 0; v < size(); ++v) {
                const std::string w = word(v);
                if (static_cast<int>(w.size()) > depth_) throw ModelError("tree node '" + nodes_[v] + "' too deep");
                for (char c : w)
                    if (c < '1' || c > '0' + branching_) throw ModelError("malformed tree node id '" + nodes_[v] + "'");
                std::vector<int> want;
                if (static_cast<int>(w.size()) < depth_)
                    for (int i = 1; i <= branching_; ++i) want.push_back(node_of_word(w + static_cast<char>('0' + i)));
                std::vector<int> have = succ_[v];
                std::sort(want.begin(), want.end());
                std::sort(have.begin(), have.end());
                if (want != have) throw ModelError("edges of tree node '" + nodes_[v] + "' do not match the tree shape");
            }
        }
    }

    /// Checks that every register value belongs to `dom`.
    void check_registers(const ConcreteDomain& dom) const {
        for (int v = 0; v < size(); ++v)
            for (std::size_t x = 0; x < vars_.size(); ++x)
                if (regs_[v][x] && !dom.contains(*regs_[v][x]))
                    throw DomainError("register value " + format_element(*regs_[v][x]) + " at node '" + nodes_[v] +
                                      "' is not an element of " + dom.name());
    }

private:

    Shape shape_ = Shape::Graph;
    int branching_ = 0;
    int depth_ = 0;
    std::vector<std::string> vars_;
    std::vector<std::string> nodes_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<int>> succ_;
    std::vector<std::set<std::string>> labels_;
    std::vector<std::vector<std::optional<Element>>> regs_;
};

/// Parses and validates a model file. `require_registers` demands a value for
/// every node and variable; `allow_reserved` admits "__" identifiers.
inline ConstraintKripke parse_model(const std::string& text, bool require_registers = true,
                                    bool allow_reserved = false) {
    enum class Section { None, Nodes, Edges, Labels, Registers } section = Section::None;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool have_shape = false, have_vars = false;
    ConstraintKripke::Shape shape = ConstraintKripke::Shape::Graph;
    int branching = 0, depth = 0;
    std::vector<std::string> vars;
    std::vector<std::pair<std::string, int>> node_ids;
    std::vector<std::vector<std::string>> edges, labels, regs;
    std::vector<int> edge_lines, label_lines, reg_lines;
    const auto ident = [&](const std::string& id) {
        if (!allow_reserved) detail::check_identifier(id, line_no);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        auto toks = detail::split_ws(detail::strip_comment(raw));
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "SHAPE") {
            if (toks.size() == 2 && toks[1] == "graph") {
                shape = ConstraintKripke::Shape::Graph;
            } else if (toks.size() == 4 && toks[1] == "tree") {
                shape = ConstraintKripke::Shape::Tree;
                try {
                    branching = std::stoi(toks[2]);
                    depth = std::stoi(toks[3]);
                } catch (const std::exception&) {
                    throw ParseError("malformed tree parameters", line_no, 1);
                }
            } else {
                throw ParseError("expected 'SHAPE graph' or 'SHAPE tree <branching> <depth>'", line_no, 1);
            }
            have_shape = true;
            section = Section::None;
            continue;
        }
        if (head == "VARS") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                ident(toks[i]);
                if (std::find(vars.begin(), vars.end(), toks[i]) != vars.end())
                    throw ParseError("duplicate variable '" + toks[i] + "'", line_no, 1);
                vars.push_back(toks[i]);
            }
            have_vars = true;
            section = Section::None;
            continue;
        }
        if (toks.size() == 1 && (head == "NODES" || head == "EDGES" || head == "LABELS" || head == "REGISTERS")) {
            section = head == "NODES"   ? Section::Nodes
                      : head == "EDGES" ? Section::Edges
                      : head == "LABELS" ? Section::Labels
                                         : Section::Registers;
            continue;
        }
        switch (section) {
            case Section::None: throw ParseError("unexpected '" + head + "' outside a section", line_no, 1);
            case Section::Nodes:
                for (const auto& t : toks) {
                    ident(t);
                    node_ids.emplace_back(t, line_no);
                }
                break;
            case Section::Edges:
                if (toks.size() != 2) throw ParseError("expected 'src dst'", line_no, 1);
                edges.push_back(toks);
                edge_lines.push_back(line_no);
                break;
            case Section::Labels:
                for (std::size_t i = 1; i < toks.size(); ++i) ident(toks[i]);
                labels.push_back(toks);
                label_lines.push_back(line_no);
                break;
            case Section::Registers:
                if (toks.size() < 3) throw ParseError("expected 'node var value'", line_no, 1);
                for (std::size_t i = 3; i < toks.size(); ++i) toks[2] += toks[i];
                toks.resize(3);
                regs.push_back(toks);
                reg_lines.push_back(line_no);
                break;
        }
    }
    if (!have_shape) throw ParseError("missing SHAPE", 1, 1);
    if (!have_vars) vars.clear();

    ConstraintKripke m;
    if (shape == ConstraintKripke::Shape::Tree) {
        m = ConstraintKripke::tree(branching, depth, vars);
        std::set<std::string> listed;
        for (const auto& [id, ln] : node_ids) {
            if (!listed.insert(id).second) throw ParseError("duplicate node id '" + id + "'", ln, 1);
            if (!m.has_node(id)) throw ParseError("node '" + id + "' is not part of the declared tree", ln, 1);
        }
        if (!node_ids.empty() && static_cast<int>(listed.size()) != m.size())
            throw ModelError("NODES lists " + std::to_string(listed.size()) + " of the " + std::to_string(m.size()) +
                             " tree nodes");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (!m.has_node(edges[i][0]) || !m.has_node(edges[i][1]))
                throw ParseError("dangling edge endpoint", edge_lines[i], 1);
            const auto& s = m.successors(m.index_of(edges[i][0]));
            if (std::find(s.begin(), s.end(), m.index_of(edges[i][1])) == s.end())
                throw ParseError("edge " + edges[i][0] + " -> " + edges[i][1] + " is not a tree edge", edge_lines[i], 1);
        }
    } else {
        m = ConstraintKripke(vars);
        for (const auto& [id, ln] : node_ids) {
            if (m.has_node(id)) throw ParseError("duplicate node id '" + id + "'", ln, 1);
            m.add_node(id);
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (!m.has_node(edges[i][0]) || !m.has_node(edges[i][1]))
                throw ParseError("dangling edge endpoint " + edges[i][0] + " -> " + edges[i][1], edge_lines[i], 1);
            m.add_edge(m.index_of(edges[i][0]), m.index_of(edges[i][1]));
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!m.has_node(labels[i][0])) throw ParseError("unknown node '" + labels[i][0] + "'", label_lines[i], 1);
        for (std::size_t j = 1; j < labels[i].size(); ++j) m.add_label(m.index_of(labels[i][0]), labels[i][j]);
    }
    std::set<std::pair<int, int>> assigned;
    for (std::size_t i = 0; i < regs.size(); ++i) {
        if (!m.has_node(regs[i][0])) throw ParseError("unknown node '" + regs[i][0] + "'", reg_lines[i], 1);
        if (!m.has_var(regs[i][1])) throw ParseError("undeclared variable '" + regs[i][1] + "'", reg_lines[i], 1);
        const int v = m.index_of(regs[i][0]), x = m.var_index(regs[i][1]);
        if (!assigned.insert({v, x}).second)
            throw ParseError("duplicate register value for " + regs[i][0] + " " + regs[i][1], reg_lines[i], 1);
        try {
            m.set_register(v, x, parse_element(regs[i][2]));
        } catch (const DomainError& e) {
            throw ParseError(e.what(), reg_lines[i], 1);
        }
    }
    m.validate(require_registers);
    return m;
}

inline std::string format_model(const ConstraintKripke& m) {
    std::string out;
    if (m.shape() == ConstraintKripke::Shape::Tree)
        out += "SHAPE tree " + std::to_string(m.branching()) + " " + std::to_string(m.depth()) + "\n";
    else
        out += "SHAPE graph\n";
    out += "VARS";
    for (const auto& x : m.vars()) out += " " + x;
    out += "\nNODES\n";
    for (const auto& n : m.nodes()) out += n + "\n";
    out += "EDGES\n";
    for (int v = 0; v < m.size(); ++v)
        for (int w : m.successors(v)) out += m.node(v) + " " + m.node(w) + "\n";
    out += "LABELS\n";
    for (int v = 0; v < m.size(); ++v) {
        if (m.labels(v).empty()) continue;
        out += m.node(v);
        for (const auto& p : m.labels(v)) out += " " + p;
        out += "\n";
    }
    out += "REGISTERS\n";
    for (int v = 0; v < m.size(); ++v)
        for (int x = 0; x < static_cast<int>(m.vars().size()); ++x)
            if (m.has_reg(v, x)) out += m.node(v) + " " + m.vars()[x] + " " + format_element(m.reg(v, x)) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Abstraction and constraint graph on finite trees

namespace detail {

/// Nodes su_1..su_k addressed by the constraint's terms, where v = su and |u| = d.
inline std::vector<int> window_nodes(const ConstraintKripke& t, int v, const Constraint& c, int d) {
    const std::string w = t.word(v);
    const std::string s = w.substr(0, w.size() - d);
    std::vector<int> out;
    for (const auto& term : c.args) out.push_back(t.node_of_word(w.substr(0, s.size() + term.offset)));
    return out;
}

inline void require_tree(const ConstraintKripke& t) {
    if (t.shape() != ConstraintKripke::Shape::Tree) throw ModelError("operation requires a tree-shaped model");
}

}  // namespace detail

/// C^a: adds p_i at every node v = su with |u| = d_i whose window satisfies R_i.
/// Nodes shallower than d_i are left unlabeled.
inline ConstraintKripke abstract_model(const ConstraintKripke& c, const AbstractionTable& table,
                                       const ConcreteDomain& dom) {
    detail::require_tree(c);
    ConstraintKripke out = c;
    for (const auto& e : table) {
        if (e.depth > c.depth())
            throw ModelError("tree depth " + std::to_string(c.depth()) + " is smaller than constraint depth " +
                             std::to_string(e.depth));
        for (int v = 0; v < c.size(); ++v)
            if (c.has_label(v, e.prop)) throw ModelError("label '" + e.prop + "' already present at '" + c.node(v) + "'");
    }
    for (int v = 0; v < c.size(); ++v) {
        const int len = static_cast<int>(c.word(v).size());
        for (const auto& e : table) {
            if (len < e.depth) continue;
            const auto ws = detail::window_nodes(c, v, e.constraint, e.depth);
            std::vector<Element> vals;
            for (std::size_t j = 0; j < ws.size(); ++j)
                vals.push_back(c.reg(ws[j], c.var_index(e.constraint.args[j].var)));
            if (dom.eval(e.constraint.rel, vals)) out.add_label(v, e.prop);
        }
    }
    return out;
}

/// Element name of (node, var) in G_T.
inline std::string graph_element_name(const std::string& node, const std::string& var) { return node + ":" + var; }

/// G_T over nodes × vars: for p_i at v = su with |u| = d_i, adds the tuple
/// ((su_1,x_1),...,(su_k,x_k)) to the relation of R_i.
inline SigmaStructure extract_constraint_graph(const ConstraintKripke& t, const AbstractionTable& table,
                                               const std::vector<std::string>& vars) {
    detail::require_tree(t);
    SigmaStructure g;
    for (const auto& n : t.nodes())
        for (const auto& x : vars) g.add_element(graph_element_name(n, x));
    const int nv = static_cast<int>(vars.size());
    const auto var_pos = [&](const std::string& x) {
        const auto it = std::find(vars.begin(), vars.end(), x);
        if (it == vars.end()) throw ModelError("constraint variable '" + x + "' not among the extraction variables");
        return static_cast<int>(it - vars.begin());
    };
    for (const auto& e : table) g.declare(e.constraint.rel);
    for (int v = 0; v < t.size(); ++v) {
        const int len = static_cast<int>(t.word(v).size());
        for (const auto& e : table) {
            if (!t.has_label(v, e.prop)) continue;
            if (len < e.depth)
                throw ModelError("proposition '" + e.prop + "' at node '" + t.node(v) + "' whose ancestor chain is shorter than " +
                                 std::to_string(e.depth));
            const auto ws = detail::window_nodes(t, v, e.constraint, e.depth);
            Tuple tup;
            for (std::size_t j = 0; j < ws.size(); ++j) tup.push_back(ws[j] * nv + var_pos(e.constraint.args[j].var));
            g.add(e.constraint.rel, std::move(tup));
        }
    }
    return g;
}

}  // namespace ctlz
