#pragma once

// Finite-structure evaluator for MSO / WMSO+B formulas.
//
// Subformulas are compiled into a hash-consed DAG whose nodes are canonical up
// to renaming of their free variables, so a subformula that recurs under
// different variable names is evaluated once. Each node evaluates to a
// three-valued truth table over all assignments of its free first-order
// variables. Consecutive set quantifiers of the same kind form a block; a
// relativized block `∃X (X ⊆ g ∧ …)` only ranges over subsets of g. A block
// whose body has no set quantifier depending on it is searched bit by bit
// with Kleene evaluation of partial sets, pruning on definite results.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ctlz/error.hpp"
#include "ctlz/mso.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/structure.hpp"

namespace ctlz {

struct MsoAssignment {
    std::map<std::string, int> fo;
    std::map<std::string, std::set<int>> so;
};

struct MsoEvalOptions {
    int max_set_elements = 12;
    /// Evaluate bodies of B X quantifiers to record the largest satisfying set.
    bool bound_diagnostics = false;
};

struct MsoEvalStats {
    std::size_t dag_nodes = 0;
    /// Largest |X| satisfying the body of any evaluated B X (with diagnostics), or -1.
    int max_bound_set = -1;
};

namespace detail {

/// Word vector with inline storage for small tables.
class WordVec {
public:
    void assign(std::size_t n, std::uint64_t v) {
        n_ = n;
        if (n > kInline) {
            heap_.assign(n, v);
        } else {
            heap_.clear();
            std::fill(inline_, inline_ + n, v);
        }
    }
    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] bool empty() const { return n_ == 0; }
    std::uint64_t* begin() { return n_ > kInline ? heap_.data() : inline_; }
    std::uint64_t* end() { return begin() + n_; }
    [[nodiscard]] const std::uint64_t* begin() const { return n_ > kInline ? heap_.data() : inline_; }
    [[nodiscard]] const std::uint64_t* end() const { return begin() + n_; }
    std::uint64_t& operator[](std::size_t i) { return begin()[i]; }
    const std::uint64_t& operator[](std::size_t i) const { return begin()[i]; }
    std::uint64_t& back() { return begin()[n_ - 1]; }

private:
    static constexpr std::size_t kInline = 4;
    std::size_t n_ = 0;
    std::uint64_t inline_[kInline] = {};
    std::vector<std::uint64_t> heap_;
};

struct KTable {
    std::size_t size = 1;
    WordVec t, f;

    static KTable make(std::size_t size, bool t_init, bool f_init) {
        KTable k;
        k.size = size;
        const std::size_t words = (size + 63) / 64;
        k.t.assign(words, t_init ? ~0ULL : 0);
        k.f.assign(words, f_init ? ~0ULL : 0);
        k.trim();
        return k;
    }
    void trim() {
        if (size % 64 && !t.empty()) {
            const std::uint64_t m = (1ULL << (size % 64)) - 1;
            t.back() &= m;
            f.back() &= m;
        }
    }
    [[nodiscard]] bool get_t(std::size_t i) const { return (t[i >> 6] >> (i & 63)) & 1; }
    [[nodiscard]] bool get_f(std::size_t i) const { return (f[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool tv, bool fv) {
        const std::uint64_t b = 1ULL << (i & 63);
        if (tv) t[i >> 6] |= b; else t[i >> 6] &= ~b;
        if (fv) f[i >> 6] |= b; else f[i >> 6] &= ~b;
    }
    [[nodiscard]] static bool all(const WordVec& v, std::size_t size) {
        for (std::size_t w = 0; w < v.size(); ++w) {
            const std::uint64_t full = (w + 1 == v.size() && size % 64) ? (1ULL << (size % 64)) - 1 : ~0ULL;
            if (v[w] != full) return false;
        }
        return true;
    }
    [[nodiscard]] bool all_t() const { return all(t, size); }
    [[nodiscard]] bool all_f() const { return all(f, size); }
};

struct SetState {
    std::uint64_t in = 0, out = 0;
};

}  // namespace detail

class MsoEvaluator {
public:
    explicit MsoEvaluator(MsoEvalOptions opt = {}) : opt_(opt) {}

    /// Compilation is cached per formula object and free-variable names, so
    /// evaluating one sentence over many structures compiles it once.
    bool eval(const Mso& f, const SigmaStructure& a, const MsoAssignment& asg = {}, MsoEvalStats* stats = nullptr) {
        std::vector<std::string> fo_names, so_names;
        for (const auto& [name, _] : asg.fo) fo_names.push_back(name);
        for (const auto& [name, _] : asg.so) so_names.push_back(name);
        RootKey key{f.identity(), fo_names, so_names};
        auto it = roots_.find(key);
        if (it == roots_.end()) {
            std::map<std::string, int> fo_env, so_env;
            std::vector<std::string> slot_names;
            for (const auto& nm : fo_names) {
                fo_env[nm] = new_var(slot_names.size());
                slot_names.push_back(nm);
            }
            for (const auto& nm : so_names) {
                so_env[nm] = new_var(slot_names.size());
                slot_names.push_back(nm);
            }
            has_set_quantifier_ = false;
            Root r{f, compile(f, fo_env, so_env), has_set_quantifier_, {}, {}};
            for (int v : r.ref.fo) r.fo_names.push_back(slot_names.at(var_slot_.at(v)));
            for (int v : r.ref.so) r.so_names.push_back(slot_names.at(var_slot_.at(v)));
            it = roots_.emplace(std::move(key), std::move(r)).first;
        }
        const Root& root = it->second;
        if (root.has_sets && a.size() > std::min(opt_.max_set_elements, 63))
            throw LimitError("set quantifiers over " + std::to_string(a.size()) + " elements exceed the limit of " +
                             std::to_string(std::min(opt_.max_set_elements, 63)));
        bind(a);
        std::vector<detail::SetState> env;
        for (const auto& nm : root.so_names) {
            std::uint64_t m = 0;
            for (int e : asg.so.at(nm)) {
                if (e < 0 || e >= n_) throw ModelError("assignment of '" + nm + "' is out of range");
                m |= 1ULL << e;
            }
            env.push_back({m, full_ & ~m});
        }
        std::size_t idx = 0, mul = 1;
        for (const auto& nm : root.fo_names) {
            const int v = asg.fo.at(nm);
            if (v < 0 || v >= n_) throw ModelError("assignment of '" + nm + "' is out of range");
            idx += static_cast<std::size_t>(v) * mul;
            mul *= n_;
        }
        const detail::KTable t = eval_node(root.ref.id, env);
        if (stats) {
            stats->dag_nodes = nodes_.size();
            stats->max_bound_set = max_bound_;
        }
        if (!t.get_t(idx) && !t.get_f(idx)) throw std::logic_error("undetermined evaluation result");
        return t.get_t(idx);
    }

private:
    enum class NK { True, False, Atom, In, Eq, Not, And, Or, Implies, Exists, Forall, Block, Bound };

    struct Child {
        int id = 0;
        std::vector<int> fo;  // child canonical var -> parent position, or -1 - k for bound var k
        std::vector<int> so;
        bool identity = false;
        mutable int gather_n = -1;
        mutable std::vector<std::uint32_t> gather;  // parent index -> child index
    };
    struct Node {
        NK kind;
        bool exists = true;  // block polarity
        int rel = -1;
        std::vector<int> pattern;
        std::vector<Child> kids;
        int nfo = 0, nso = 0;
        int block_vars = 0;
        std::vector<int> guard;  // per block var: kid index or -1
        bool dep_set = false;    // has a set quantifier with free set variables below
        std::unordered_map<std::uint64_t, detail::KTable> memo;
    };
    struct Ref {
        int id = 0;
        std::vector<int> fo, so;  // unique variable ids
    };
    struct RootKey {
        const void* formula;
        std::vector<std::string> fo, so;
        friend bool operator<(const RootKey& a, const RootKey& b) {
            return std::tie(a.formula, a.fo, a.so) < std::tie(b.formula, b.fo, b.so);
        }
    };
    struct Root {
        Mso keep;
        Ref ref;
        bool has_sets;
        std::vector<std::string> fo_names, so_names;
    };
    struct RelEntry {
        RelationSymbol symbol;
        std::vector<std::uint64_t> bits;
    };

    /// Loads the relations of `a` and clears every structure-dependent cache.
    void bind(const SigmaStructure& a) {
        n_ = a.size();
        full_ = n_ >= 64 ? ~0ULL : (1ULL << n_) - 1;
        max_bound_ = -1;
        for (auto& nd : nodes_) nd.memo.clear();
        for (auto& rel : rels_) {
            std::size_t size = 1;
            for (int i = 0; i < rel.symbol.arity; ++i) {
                size *= static_cast<std::size_t>(n_);
                if (size > (1u << 26)) throw LimitError("relation table too large");
            }
            rel.bits.assign((size + 63) / 64, 0);
            for (const auto& tup : a.tuples(rel.symbol)) {
                std::size_t idx = 0, mul = 1;
                for (int e : tup) {
                    idx += static_cast<std::size_t>(e) * mul;
                    mul *= n_;
                }
                rel.bits[idx >> 6] |= 1ULL << (idx & 63);
            }
        }
    }

    // -- compilation --------------------------------------------------------

    int new_var(std::size_t slot) {
        var_slot_.push_back(static_cast<int>(slot));
        return static_cast<int>(var_slot_.size()) - 1;
    }
    int bound_var() {
        var_slot_.push_back(-1);
        return static_cast<int>(var_slot_.size()) - 1;
    }

    int relation_index(const std::string& token, int arity) {
        const std::string key = token + "/" + std::to_string(arity);
        const auto it = rel_index_.find(key);
        if (it != rel_index_.end()) return it->second;
        RelationSymbol r;
        try {
            r = parse_relation_token(token, arity);
        } catch (const Error&) {
            r = RelationSymbol::interpreted(token, arity);
        }
        rels_.push_back({r, {}});
        const int id = static_cast<int>(rels_.size()) - 1;
        rel_index_.emplace(key, id);
        return id;
    }

    static int lookup(const std::map<std::string, int>& env, const std::string& v) {
        const auto it = env.find(v);
        if (it == env.end()) throw ModelError("free variable '" + v + "' is unassigned");
        return it->second;
    }

    /// Interns a node built from `kids`; bound_fo / bound_so are the variable
    /// ids bound at this node.
    Ref intern(NK kind, bool exists, int rel, std::vector<int> pattern, std::vector<int> own_fo,
               std::vector<int> own_so, const std::vector<Ref>& kids, const std::vector<int>& bound_fo,
               const std::vector<int>& bound_so, int block_vars = 0, std::vector<int> guard = {}) {
        Ref out{0, std::move(own_fo), std::move(own_so)};
        const auto pos_of = [](std::vector<int>& list, int v) {
            const auto it = std::find(list.begin(), list.end(), v);
            if (it != list.end()) return static_cast<int>(it - list.begin());
            list.push_back(v);
            return static_cast<int>(list.size()) - 1;
        };
        std::vector<Child> children;
        for (const auto& k : kids) {
            Child c;
            c.id = k.id;
            for (int v : k.fo) {
                const auto b = std::find(bound_fo.begin(), bound_fo.end(), v);
                c.fo.push_back(b != bound_fo.end() ? -1 - static_cast<int>(b - bound_fo.begin()) : pos_of(out.fo, v));
            }
            for (int v : k.so) {
                const auto b = std::find(bound_so.begin(), bound_so.end(), v);
                c.so.push_back(b != bound_so.end() ? -1 - static_cast<int>(b - bound_so.begin()) : pos_of(out.so, v));
            }
            children.push_back(std::move(c));
        }
        for (auto& c : children) {
            c.identity = c.fo.size() == out.fo.size();
            for (std::size_t i = 0; c.identity && i < c.fo.size(); ++i) c.identity = c.fo[i] == static_cast<int>(i);
        }
        std::vector<std::int64_t> key{static_cast<int>(kind), exists ? 1 : 0, rel, block_vars,
                                      static_cast<std::int64_t>(pattern.size())};
        key.insert(key.end(), pattern.begin(), pattern.end());
        key.insert(key.end(), guard.begin(), guard.end());
        for (const auto& c : children) {
            key.push_back(c.id);
            key.push_back(static_cast<std::int64_t>(c.fo.size()));
            key.insert(key.end(), c.fo.begin(), c.fo.end());
            key.push_back(static_cast<std::int64_t>(c.so.size()));
            key.insert(key.end(), c.so.begin(), c.so.end());
        }
        const auto it = interned_.find(key);
        if (it != interned_.end()) {
            out.id = it->second;
            return out;
        }
        Node nd;
        nd.kind = kind;
        nd.exists = exists;
        nd.rel = rel;
        nd.pattern = std::move(pattern);
        nd.nfo = static_cast<int>(out.fo.size());
        nd.nso = static_cast<int>(out.so.size());
        nd.block_vars = block_vars;
        nd.guard = std::move(guard);
        if (nd.nso > 0) {
            if (kind == NK::Block) nd.dep_set = true;
            for (const auto& c : children)
                if (nodes_[c.id].dep_set && nodes_[c.id].kind != NK::Bound) nd.dep_set = true;
        }
        nd.kids = std::move(children);
        nodes_.push_back(std::move(nd));
        out.id = static_cast<int>(nodes_.size()) - 1;
        interned_.emplace(std::move(key), out.id);
        return out;
    }

    /// Matches ∀z (z ∈ set → G) with G free only in z; returns G and z.
    static bool match_subset(const Mso& f, const std::string& set, const std::vector<std::string>& block,
                             Mso& guard, std::string& z) {
        if (f.kind() != Mso::Kind::Forall || f.body().kind() != Mso::Kind::Implies) return false;
        const Mso& ante = f.body().kids()[0];
        if (ante.kind() != Mso::Kind::In || ante.args()[0] != f.name() || ante.args()[1] != set) return false;
        const Mso& g = f.body().kids()[1];
        const auto fv = free_vars(g);
        for (const auto& v : fv.fo)
            if (v != f.name()) return false;
        for (const auto& b : block)
            if (fv.so.count(b)) return false;
        guard = g;
        z = f.name();
        return true;
    }

    Ref compile(const Mso& f, std::map<std::string, int>& fo_env, std::map<std::string, int>& so_env) {
        switch (f.kind()) {
            case Mso::Kind::True: return intern(NK::True, true, -1, {}, {}, {}, {}, {}, {});
            case Mso::Kind::False: return intern(NK::False, true, -1, {}, {}, {}, {}, {}, {});
            case Mso::Kind::Atom: {
                std::vector<int> own, pattern;
                for (const auto& a : f.args()) {
                    const int v = lookup(fo_env, a);
                    const auto it = std::find(own.begin(), own.end(), v);
                    if (it == own.end()) {
                        pattern.push_back(static_cast<int>(own.size()));
                        own.push_back(v);
                    } else {
                        pattern.push_back(static_cast<int>(it - own.begin()));
                    }
                }
                const int rel = relation_index(f.name(), static_cast<int>(f.args().size()));
                return intern(NK::Atom, true, rel, std::move(pattern), std::move(own), {}, {}, {}, {});
            }
            case Mso::Kind::Eq: {
                const int x = lookup(fo_env, f.args()[0]), y = lookup(fo_env, f.args()[1]);
                if (x == y) return intern(NK::Eq, true, -1, {0, 0}, {x}, {}, {}, {}, {});
                return intern(NK::Eq, true, -1, {0, 1}, {x, y}, {}, {}, {}, {});
            }
            case Mso::Kind::In: {
                return intern(NK::In, true, -1, {}, {lookup(fo_env, f.args()[0])}, {lookup(so_env, f.args()[1])}, {},
                              {}, {});
            }
            case Mso::Kind::Not:
            case Mso::Kind::And:
            case Mso::Kind::Or:
            case Mso::Kind::Implies: {
                std::vector<Ref> kids;
                for (const auto& k : f.kids()) kids.push_back(compile(k, fo_env, so_env));
                const NK k = f.kind() == Mso::Kind::Not   ? NK::Not
                             : f.kind() == Mso::Kind::And ? NK::And
                             : f.kind() == Mso::Kind::Or  ? NK::Or
                                                          : NK::Implies;
                return intern(k, true, -1, {}, {}, {}, kids, {}, {});
            }
            case Mso::Kind::Exists:
            case Mso::Kind::Forall: {
                const int v = bound_var();
                const auto saved = scope_in(fo_env, f.name(), v);
                Ref body = compile(f.body(), fo_env, so_env);
                scope_out(fo_env, f.name(), saved);
                return intern(f.kind() == Mso::Kind::Exists ? NK::Exists : NK::Forall, true, -1, {}, {}, {}, {body},
                              {v}, {});
            }
            case Mso::Kind::Bound: {
                has_set_quantifier_ = true;
                const int v = bound_var();
                const auto saved = scope_in(so_env, f.name(), v);
                Ref body = compile(f.body(), fo_env, so_env);
                scope_out(so_env, f.name(), saved);
                return intern(NK::Bound, true, -1, {}, {}, {}, {body}, {}, {v});
            }
            case Mso::Kind::ExistsSet:
            case Mso::Kind::ForallSet: return compile_block(f, fo_env, so_env);
        }
        throw std::logic_error("unknown formula kind");
    }

    static std::optional<int> scope_in(std::map<std::string, int>& env, const std::string& name, int v) {
        std::optional<int> saved;
        if (const auto it = env.find(name); it != env.end()) saved = it->second;
        env[name] = v;
        return saved;
    }
    static void scope_out(std::map<std::string, int>& env, const std::string& name, const std::optional<int>& saved) {
        if (saved) env[name] = *saved;
        else env.erase(name);
    }

    Ref compile_block(const Mso& f, std::map<std::string, int>& fo_env, std::map<std::string, int>& so_env) {
        has_set_quantifier_ = true;
        const Mso::Kind kind = f.kind();
        const bool exists = kind == Mso::Kind::ExistsSet;
        std::vector<std::string> names;
        std::vector<std::optional<std::pair<Mso, std::string>>> guards;
        Mso cur = f;
        Mso body;
        while (true) {
            names.push_back(cur.name());
            const Mso& b = cur.body();
            Mso g;
            std::string z;
            Mso rest = b;
            std::optional<std::pair<Mso, std::string>> guard;
            if (exists && b.kind() == Mso::Kind::And && match_subset(b.kids()[0], cur.name(), names, g, z)) {
                guard = std::make_pair(g, z);
                std::vector<Mso> others(b.kids().begin() + 1, b.kids().end());
                rest = Mso::conj(std::move(others));
            } else if (!exists && b.kind() == Mso::Kind::Implies &&
                       match_subset(b.kids()[0], cur.name(), names, g, z)) {
                guard = std::make_pair(g, z);
                rest = b.kids()[1];
            }
            guards.push_back(guard);
            // A later guard may not mention this variable either; names already excludes shadowing issues
            // because match_subset checks every block name collected so far.
            if (rest.kind() == kind && std::find(names.begin(), names.end(), rest.name()) == names.end()) {
                cur = rest;
                continue;
            }
            body = rest;
            break;
        }
        std::vector<int> ids;
        std::vector<std::optional<int>> saved;
        for (const auto& nm : names) {
            ids.push_back(bound_var());
            saved.push_back(scope_in(so_env, nm, ids.back()));
        }
        std::vector<Ref> kids;
        std::vector<int> guard_kid;
        std::vector<int> bound_fo;
        for (const auto& g : guards) {
            if (!g) {
                guard_kid.push_back(-1);
                continue;
            }
            const int z = bound_var();
            const auto s = scope_in(fo_env, g->second, z);
            kids.push_back(compile(g->first, fo_env, so_env));
            scope_out(fo_env, g->second, s);
            bound_fo.push_back(z);
            guard_kid.push_back(static_cast<int>(kids.size()) - 1);
        }
        kids.push_back(compile(body, fo_env, so_env));
        for (std::size_t i = names.size(); i-- > 0;) scope_out(so_env, names[i], saved[i]);
        return intern(NK::Block, exists, -1, {}, {}, {}, kids, bound_fo, ids, static_cast<int>(names.size()),
                      std::move(guard_kid));
    }

    // -- evaluation ---------------------------------------------------------

    [[nodiscard]] std::size_t table_size(int arity) const {
        std::size_t s = 1;
        for (int i = 0; i < arity; ++i) {
            s *= static_cast<std::size_t>(n_);
            if (s > (1u << 26)) throw LimitError("truth table too large");
        }
        return s;
    }

    [[nodiscard]] bool complete(const std::vector<detail::SetState>& env) const {
        return std::all_of(env.begin(), env.end(), [&](const auto& s) { return (s.in | s.out) == full_; });
    }

    /// Re-indexes a child table (over the child's canonical variables) into the
    /// parent's variable space of `arity` positions.
    detail::KTable broadcast(const detail::KTable& c, const Child& child, int arity) const {
        if (child.identity) return c;
        const std::size_t size = table_size(arity);
        if (child.gather_n != n_) {
            child.gather.assign(size, 0);
            std::vector<std::size_t> stride(arity, 0);
            std::size_t mul = 1;
            for (int pos : child.fo) {
                stride.at(pos) += mul;
                mul *= n_;
            }
            std::vector<int> val(arity, 0);
            std::size_t ci = 0;
            for (std::size_t pi = 0; pi < size; ++pi) {
                child.gather[pi] = static_cast<std::uint32_t>(ci);
                for (int j = 0; j < arity; ++j) {
                    ci += stride[j];
                    if (++val[j] < n_) break;
                    ci -= stride[j] * n_;
                    val[j] = 0;
                }
            }
            child.gather_n = n_;
        }
        detail::KTable out = detail::KTable::make(size, false, false);
        for (std::size_t pi = 0; pi < size; ++pi) {
            const std::uint32_t ci = child.gather[pi];
            const std::uint64_t b = 1ULL << (pi & 63);
            if ((c.t[ci >> 6] >> (ci & 63)) & 1) out.t[pi >> 6] |= b;
            if ((c.f[ci >> 6] >> (ci & 63)) & 1) out.f[pi >> 6] |= b;
        }
        return out;
    }

    std::vector<detail::SetState> child_env(const Child& c, const std::vector<detail::SetState>& env,
                                            const std::vector<detail::SetState>& bound) const {
        std::vector<detail::SetState> out;
        out.reserve(c.so.size());
        for (int p : c.so) out.push_back(p >= 0 ? env[p] : bound[-1 - p]);
        return out;
    }

    detail::KTable eval_node(int id, const std::vector<detail::SetState>& env) {
        Node& nd = nodes_[id];
        const bool done = complete(env);
        std::uint64_t key = 0;
        bool memo = done && static_cast<std::uint64_t>(nd.nso) * static_cast<std::uint64_t>(n_) <= 64;
        if (memo) {
            for (const auto& s : env) key = (key << n_) | s.in;
            const auto it = nd.memo.find(key);
            if (it != nd.memo.end()) return it->second;
        }
        detail::KTable out = compute(id, env);
        Node& again = nodes_[id];
        if (memo && (again.nso == 0 || again.memo.size() < 4096)) again.memo.emplace(key, out);
        return out;
    }

    detail::KTable compute(int id, const std::vector<detail::SetState>& env) {
        const NK kind = nodes_[id].kind;
        const int arity = nodes_[id].nfo;
        const std::size_t size = table_size(arity);
        switch (kind) {
            case NK::True: return detail::KTable::make(1, true, false);
            case NK::False: return detail::KTable::make(1, false, true);
            case NK::Atom: {
                const Node& nd = nodes_[id];
                const auto& bits = rels_[nd.rel].bits;
                detail::KTable out = detail::KTable::make(size, false, false);
                std::vector<int> val(arity, 0);
                for (std::size_t pi = 0; pi < size; ++pi) {
                    std::size_t ri = 0, mul = 1;
                    for (int p : nd.pattern) {
                        ri += static_cast<std::size_t>(val[p]) * mul;
                        mul *= n_;
                    }
                    const bool v = (bits[ri >> 6] >> (ri & 63)) & 1;
                    out.set(pi, v, !v);
                    for (int j = 0; j < arity; ++j) {
                        if (++val[j] < n_) break;
                        val[j] = 0;
                    }
                }
                return out;
            }
            case NK::Eq: {
                detail::KTable out = detail::KTable::make(size, false, false);
                const bool same = nodes_[id].pattern[1] == 0;
                for (std::size_t pi = 0; pi < size; ++pi) {
                    const bool v = same || static_cast<int>(pi % n_) == static_cast<int>(pi / n_);
                    out.set(pi, v, !v);
                }
                return out;
            }
            case NK::In: {
                detail::KTable out = detail::KTable::make(size, false, false);
                for (std::size_t e = 0; e < size; ++e) out.set(e, (env[0].in >> e) & 1, (env[0].out >> e) & 1);
                return out;
            }
            case NK::Not: {
                detail::KTable c = broadcast(eval_kid(id, 0, env, {}), nodes_[id].kids[0], arity);
                std::swap(c.t, c.f);
                return c;
            }
            case NK::And:
            case NK::Or:
            case NK::Implies: {
                const bool conj = kind == NK::And;
                detail::KTable acc = detail::KTable::make(size, conj, !conj);
                const std::size_t nk = nodes_[id].kids.size();
                for (std::size_t i = 0; i < nk; ++i) {
                    detail::KTable c = broadcast(eval_kid(id, i, env, {}), nodes_[id].kids[i], arity);
                    if (kind == NK::Implies && i == 0) std::swap(c.t, c.f);
                    for (std::size_t w = 0; w < acc.t.size(); ++w) {
                        if (conj) {
                            acc.t[w] &= c.t[w];
                            acc.f[w] |= c.f[w];
                        } else {
                            acc.t[w] |= c.t[w];
                            acc.f[w] &= c.f[w];
                        }
                    }
                    if (conj ? acc.all_f() : acc.all_t()) break;
                }
                return acc;
            }
            case NK::Exists:
            case NK::Forall: return quantify_fo(id, env);
            case NK::Bound: return eval_bound(id, env);
            case NK::Block: return eval_block(id, env);
        }
        throw std::logic_error("unknown node kind");
    }

    detail::KTable eval_kid(int id, std::size_t i, const std::vector<detail::SetState>& env,
                            const std::vector<detail::SetState>& bound) {
        const Child& c = nodes_[id].kids[i];
        return eval_node(c.id, child_env(c, env, bound));
    }

    detail::KTable quantify_fo(int id, const std::vector<detail::SetState>& env) {
        const bool ex = nodes_[id].kind == NK::Exists;
        const int arity = nodes_[id].nfo;
        const std::vector<int> map = nodes_[id].kids[0].fo;
        const detail::KTable body = eval_kid(id, 0, env, {});
        const std::size_t size = table_size(arity);
        detail::KTable out = detail::KTable::make(size, false, false);
        std::vector<std::size_t> stride(arity, 0);
        std::size_t bound_stride = 0, mul = 1;
        bool has_bound = false;
        for (int pos : map) {
            if (pos < 0) {
                bound_stride = mul;
                has_bound = true;
            } else {
                stride[pos] += mul;
            }
            mul *= n_;
        }
        std::vector<int> val(arity, 0);
        std::size_t base = 0;
        for (std::size_t pi = 0; pi < size; ++pi) {
            bool t, f;
            if (!has_bound) {
                // Vacuous quantifier: over an empty domain ∃ is false and ∀ is true.
                if (n_ == 0) {
                    t = !ex;
                    f = ex;
                } else {
                    t = body.get_t(base);
                    f = body.get_f(base);
                }
            } else {
                bool any_t = false, all_t = true, any_f = false, all_f = true;
                for (int v = 0; v < n_; ++v) {
                    const std::size_t ci = base + static_cast<std::size_t>(v) * bound_stride;
                    const bool ct = body.get_t(ci), cf = body.get_f(ci);
                    any_t |= ct;
                    all_t &= ct;
                    any_f |= cf;
                    all_f &= cf;
                }
                t = ex ? any_t : all_t;
                f = ex ? all_f : any_f;
            }
            out.set(pi, t, f);
            for (int j = 0; j < arity; ++j) {
                base += stride[j];
                if (++val[j] < n_) break;
                base -= stride[j] * n_;
                val[j] = 0;
            }
        }
        return out;
    }

    detail::KTable eval_bound(int id, const std::vector<detail::SetState>& env) {
        const std::size_t size = table_size(nodes_[id].nfo);
        if (opt_.bound_diagnostics && complete(env)) {
            for (std::uint64_t x = 0;; x = (x - full_) & full_) {
                const std::vector<detail::SetState> bound{{x, full_ & ~x}};
                const detail::KTable b = eval_kid(id, 0, env, bound);
                if (std::any_of(b.t.begin(), b.t.end(), [](std::uint64_t w) { return w != 0; }))
                    max_bound_ = std::max(max_bound_, std::popcount(x));
                if (x == full_) break;
            }
        }
        return detail::KTable::make(size, true, false);
    }

    struct BlockRun {
        int id = 0;
        bool exists;
        int arity;
        std::size_t size;
        const std::vector<detail::SetState>* env;
        std::vector<detail::SetState> vars;
        std::vector<std::pair<int, int>> bits;  // (block var, element)
        detail::WordVec need, found, maybe;
        bool finished = false;
    };

    detail::KTable eval_block(int id, const std::vector<detail::SetState>& env) {
        if (!complete(env)) throw std::logic_error("set quantifier block evaluated under a partial assignment");
        const int nvars = nodes_[id].block_vars;
        const int arity = nodes_[id].nfo;
        const std::vector<int> guards = nodes_[id].guard;
        std::vector<std::uint64_t> allowed(nvars, full_);
        for (int j = 0; j < nvars; ++j) {
            if (guards[j] < 0) continue;
            const detail::KTable g = eval_kid(id, guards[j], env, {});
            std::uint64_t m = 0;
            for (int e = 0; e < n_; ++e) {
                const std::size_t i = g.size == 1 ? 0 : static_cast<std::size_t>(e);
                if (!g.get_t(i) && !g.get_f(i)) throw std::logic_error("undetermined subset guard");
                if (g.get_t(i)) m |= 1ULL << e;
            }
            allowed[j] = m;
        }
        const std::size_t body_kid = nodes_[id].kids.size() - 1;
        const Child body = nodes_[id].kids[body_kid];
        const bool dfs = !nodes_[body.id].dep_set;

        BlockRun run{id, nodes_[id].exists, arity, table_size(arity), &env, {}, {}, {}, {}, {}};
        const std::size_t words = (run.size + 63) / 64;
        run.need = detail::KTable::make(run.size, true, true).t;
        run.found.assign(words, 0);
        run.maybe.assign(words, 0);
        for (int j = 0; j < nvars; ++j) run.vars.push_back({0, full_ & ~allowed[j]});

        if (dfs) {
            for (int e = 0; e < n_; ++e)
                for (int j = 0; j < nvars; ++j)
                    if ((allowed[j] >> e) & 1) run.bits.emplace_back(j, e);
            search(run, body, 0);
        } else {
            enumerate(run, body, allowed, 0);
        }
        detail::KTable out = detail::KTable::make(run.size, false, false);
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t decided = run.found[w];
            const std::uint64_t other = ~(run.found[w] | run.maybe[w]);
            // found = witness of the quantifier's polarity (∃: some X true, ∀: some X false).
            out.t[w] = run.exists ? decided : other;
            out.f[w] = run.exists ? other : decided;
        }
        out.trim();
        return out;
    }

    /// Body table seen from the quantifier's polarity: `pos` = definite witness,
    /// `neg` = definitely not a witness.
    void body_view(BlockRun& run, const Child& body, detail::WordVec& pos, detail::WordVec& neg) {
        const detail::KTable b = broadcast(eval_node(body.id, child_env(body, *run.env, run.vars)), body, run.arity);
        pos = run.exists ? b.t : b.f;
        neg = run.exists ? b.f : b.t;
    }

    void search(BlockRun& run, const Child& body, std::size_t depth) {
        if (run.finished) return;
        detail::WordVec pos, neg;
        body_view(run, body, pos, neg);
        bool open = false;
        for (std::size_t w = 0; w < run.need.size(); ++w) {
            const std::uint64_t hit = pos[w] & run.need[w];
            run.found[w] |= hit;
            run.need[w] &= ~hit;
            if (run.need[w] & ~neg[w]) open = true;
        }
        if (std::all_of(run.need.begin(), run.need.end(), [](std::uint64_t w) { return w == 0; })) {
            run.finished = true;
            return;
        }
        if (!open) return;
        if (depth == run.bits.size()) {
            for (std::size_t w = 0; w < run.need.size(); ++w) run.maybe[w] |= run.need[w] & ~neg[w];
            return;
        }
        const auto [j, e] = run.bits[depth];
        const std::uint64_t b = 1ULL << e;
        run.vars[j].in |= b;
        search(run, body, depth + 1);
        run.vars[j].in &= ~b;
        if (run.finished) return;
        run.vars[j].out |= b;
        search(run, body, depth + 1);
        run.vars[j].out &= ~b;
    }

    void enumerate(BlockRun& run, const Child& body, const std::vector<std::uint64_t>& allowed, int j) {
        if (run.finished) return;
        if (j == static_cast<int>(allowed.size())) {
            detail::WordVec pos, neg;
            body_view(run, body, pos, neg);
            for (std::size_t w = 0; w < run.need.size(); ++w) {
                const std::uint64_t hit = pos[w] & run.need[w];
                run.found[w] |= hit;
                run.need[w] &= ~hit;
                run.maybe[w] |= run.need[w] & ~neg[w];
            }
            if (std::all_of(run.need.begin(), run.need.end(), [](std::uint64_t w) { return w == 0; }))
                run.finished = true;
            return;
        }
        const std::uint64_t a = allowed[j];
        for (std::uint64_t x = 0;; x = (x - a) & a) {
            run.vars[j] = {x, full_ & ~x};
            enumerate(run, body, allowed, j + 1);
            if (run.finished || x == a) break;
        }
        run.vars[j] = {0, full_ & ~a};
    }

    MsoEvalOptions opt_;
    int n_ = 0;
    std::uint64_t full_ = 0;
    std::map<RootKey, Root> roots_;
    bool has_set_quantifier_ = false;
    int max_bound_ = -1;
    std::vector<int> var_slot_;
    std::vector<Node> nodes_;
    std::map<std::vector<std::int64_t>, int> interned_;
    std::map<std::string, int> rel_index_;
    std::vector<RelEntry> rels_;
};

/// Brute-force truth of `f` in the finite structure `a` under `asg`; B X φ is
/// true on every finite structure.
inline bool eval_finite(const Mso& f, const SigmaStructure& a, const MsoAssignment& asg = {},
                        const MsoEvalOptions& opt = {}, MsoEvalStats* stats = nullptr) {
    MsoEvaluator ev(opt);
    return ev.eval(f, a, asg, stats);
}

}  // namespace ctlz
