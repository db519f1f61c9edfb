// Command-line front end.
//
// Exit codes: 0 decided or completed, 1 negative verdict (no homomorphism,
// no model within bounds, MSO sentence false, selftest failure), 2 input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctlz/acceptance.hpp"
#include "ctlz/domain.hpp"
#include "ctlz/error.hpp"
#include "ctlz/formula.hpp"
#include "ctlz/homcheck.hpp"
#include "ctlz/model.hpp"
#include "ctlz/modelcheck.hpp"
#include "ctlz/mso.hpp"
#include "ctlz/mso_emit.hpp"
#include "ctlz/mso_eval.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"
#include "ctlz/satsearch.hpp"
#include "ctlz/structure.hpp"

using json = nlohmann::json;
using namespace ctlz;

namespace {

struct InputError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A file's contents when `arg` names a regular file, otherwise `arg` itself.
std::string text_or_file(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) return read_file(arg);
    return arg;
}

void print(bool as_json, const json& j, const std::string& text) {
    if (as_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

json table_json(const AbstractionTable& table) {
    json out = json::array();
    for (const auto& e : table)
        out.push_back({{"constraint", to_string(e.constraint)}, {"depth", e.depth}, {"prop", e.prop}});
    return out;
}

std::string table_text(const AbstractionTable& table) {
    std::string out;
    for (const auto& e : table)
        out += e.prop + " = " + to_string(e.constraint) + " (depth " + std::to_string(e.depth) + ")\n";
    return out;
}

/// Parses "x=a" (first-order) and "X=a,b" (set, possibly empty) assignments.
MsoAssignment parse_assignments(const std::vector<std::string>& items, const SigmaStructure& a) {
    MsoAssignment asg;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("assignment '" + item + "' is not of the form var=value");
        const std::string var = item.substr(0, eq), rhs = item.substr(eq + 1);
        const bool is_set = std::isupper(static_cast<unsigned char>(var[0])) != 0;
        if (!is_set) {
            if (!a.has_element(rhs)) throw InputError("unknown element '" + rhs + "'");
            asg.fo[var] = a.index_of(rhs);
            continue;
        }
        std::set<int> members;
        std::stringstream ss(rhs);
        std::string e;
        while (std::getline(ss, e, ','))
            if (!e.empty()) {
                if (!a.has_element(e)) throw InputError("unknown element '" + e + "'");
                members.insert(a.index_of(e));
            }
        asg.so[var] = std::move(members);
    }
    return asg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint CTL* toolkit: formulas, homomorphism checks, MSO emission, model checking"};
    app.require_subcommand(1);
    bool as_json = false;
    int threads = 1;
    app.add_flag("--json", as_json, "Structured output with sorted keys");
    app.add_option("--threads", threads, "Worker cap (searches currently run on one thread)")->check(CLI::PositiveNumber);

    std::string formula, domain = "Z", model_path, structure_path, target = "Z", alpha_text, edge_text = "(lt x y)";
    bool allow_reserved = false, full_sweep = false, oracle = false, from_registers = false, pretty = false;
    bool quick = false;
    int max_nodes = 2, range = 5, branching = 2, max_set = 12;
    std::int64_t bound = 0;
    std::uint64_t seed = 1;
    std::string core, hom_target;
    std::vector<std::string> assignments, edge_vars = {"x", "y"};

    const auto formula_opt = [&](CLI::App* s, bool required = true) {
        auto* o = s->add_option("--formula", formula, "Formula text or file");
        if (required) o->required();
    };
    const auto domain_opt = [&](CLI::App* s) { s->add_option("--domain", domain, "Z, N, negZ, Q, allenZ or lexZ[n]"); };

    auto* parse = app.add_subcommand("parse", "Parse a formula and print it canonically");
    formula_opt(parse);
    parse->add_flag("--allow-reserved", allow_reserved, "Accept identifiers starting with __");
    auto* nnf = app.add_subcommand("nnf", "Negation normal form");
    formula_opt(nnf);
    auto* snnf = app.add_subcommand("snnf", "Strong negation normal form over a domain");
    formula_opt(snnf);
    domain_opt(snnf);
    auto* abstract = app.add_subcommand("abstract", "Abstract constraints to propositions; with --model, label the tree");
    formula_opt(abstract);
    domain_opt(abstract);
    abstract->add_option("--model", model_path, "Constraint tree file");
    auto* extract = app.add_subcommand("extract", "Constraint graph G_T of a labeled tree");
    formula_opt(extract);
    domain_opt(extract);
    extract->add_option("--model", model_path, "Tree file")->required();
    extract->add_flag("--from-registers", from_registers, "Compute the labels from the registers first");
    auto* homcheck = app.add_subcommand("homcheck", "Decide a homomorphism into Z, N, negZ or Q");
    homcheck->add_option("--structure", structure_path, "Structure file")->required();
    homcheck->add_option("--target", target, "Z, N, negZ or Q");
    auto* brutehom = app.add_subcommand("brutehom", "Exhaustive homomorphism search in [-K, K]");
    brutehom->add_option("--structure", structure_path, "Structure file")->required();
    brutehom->add_option("--target", target, "Z, N, negZ or Q");
    brutehom->add_option("--bound", bound, "K; defaults to the witness bound of the structure");
    auto* emit = app.add_subcommand("emit-mso", "Emit an MSO formula");
    emit->add_option("--core", core, "reach, reach_restricted, ecycle, path or bpaths");
    emit->add_option("--edge", edge_text, "Edge formula with two free variables");
    emit->add_option("--edge-vars", edge_vars, "Free variables of the edge formula")->expected(2);
    emit->add_option("--hom", hom_target, "Homomorphism sentence target: Z_order_only, Z, N or negZ");
    emit->add_option("--structure", structure_path, "Structure whose signature the sentence covers");
    emit->add_option("--signature", formula, "Relation tokens separated by spaces");
    emit->add_option("--alpha", alpha_text, "MSO formula to encode over extended trees (text or file)");
    emit->add_option("--formula", model_path, "CTL* formula supplying the abstraction table for --alpha");
    emit->add_option("--branching", branching, "Tree branching d for --alpha");
    emit->add_flag("--pretty", pretty, "Indented output");
    auto* evalm = app.add_subcommand("eval-mso", "Evaluate an MSO formula on a finite structure");
    evalm->add_option("--formula", formula, "MSO formula text or file")->required();
    evalm->add_option("--structure", structure_path, "Structure file")->required();
    evalm->add_option("--assign", assignments, "x=elem or X=e1,e2 (repeatable)");
    evalm->add_option("--max-set-elements", max_set, "Refuse set quantification above this size");
    auto* mc = app.add_subcommand("mc", "Model check a state formula on a constraint graph");
    formula_opt(mc);
    domain_opt(mc);
    mc->add_option("--model", model_path, "Model file")->required();
    mc->add_flag("--oracle", oracle, "Use the CTL fixpoint oracle");
    auto* sat = app.add_subcommand("sat", "Bounded model search");
    formula_opt(sat);
    domain_opt(sat);
    sat->add_option("--max-nodes", max_nodes, "Largest node count");
    sat->add_option("--range", range, "Register values in [-R, R]");
    sat->add_flag("--full-sweep", full_sweep, "Try every integer in the range");
    auto* interp = app.add_subcommand("interp", "Rewrite a formula over allenZ or lexZ[n] into Z");
    formula_opt(interp);
    domain_opt(interp);
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria");
    selftest->add_flag("--quick", quick, "Smaller randomized corpora");
    selftest->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto load_structure = [&]() { return parse_structure(read_file(structure_path)); };

        if (parse->parsed()) {
            const Formula f = parse_path_formula(text_or_file(formula), allow_reserved);
            const bool state = is_state_formula(f);
            json j = {{"formula", to_string(f)},
                      {"state", state},
                      {"variables", variables_of(f)},
                      {"propositions", propositions_of(f)},
                      {"constraint_depth", max_constraint_depth(f)}};
            std::string text = to_string(f) + "\n";
            if (state) {
                const auto e = count_e(f);
                j["e_count"] = e.e_count;
                j["d"] = e.d;
            }
            print(as_json, j, text);
            return 0;
        }
        if (nnf->parsed()) {
            const Formula f = to_nnf(parse_path_formula(text_or_file(formula)));
            print(as_json, {{"formula", to_string(f)}}, to_string(f) + "\n");
            return 0;
        }
        if (snnf->parsed()) {
            const Formula f = to_snnf(parse_path_formula(text_or_file(formula)), ConcreteDomain::by_name(domain));
            print(as_json, {{"formula", to_string(f)}}, to_string(f) + "\n");
            return 0;
        }
        if (abstract->parsed()) {
            const Formula f = parse_path_formula(text_or_file(formula));
            const auto abs = abstract_constraints(f);
            json j = {{"formula", to_string(abs.formula)}, {"table", table_json(abs.table)}};
            std::string text = to_string(abs.formula) + "\n" + table_text(abs.table);
            if (!model_path.empty()) {
                const auto c = parse_model(read_file(model_path));
                const auto t = abstract_model(c, abs.table, ConcreteDomain::by_name(domain));
                j["model"] = format_model(t);
                text += format_model(t);
            }
            print(as_json, j, text);
            return 0;
        }
        if (extract->parsed()) {
            const Formula f = parse_path_formula(text_or_file(formula));
            const auto abs = abstract_constraints(f);
            auto t = parse_model(read_file(model_path), from_registers, true);
            if (from_registers) t = abstract_model(t, abs.table, ConcreteDomain::by_name(domain));
            std::vector<std::string> vars = t.vars();
            if (vars.empty()) vars = variables_of(f);
            const auto g = extract_constraint_graph(t, abs.table, vars);
            print(as_json, {{"structure", format_structure(g)}, {"table", table_json(abs.table)}}, format_structure(g));
            return 0;
        }
        if (homcheck->parsed() || brutehom->parsed()) {
            const auto a = load_structure();
            const Target t = parse_target(target);
            json j;
            std::string text;
            std::optional<std::vector<Rational>> witness;
            if (homcheck->parsed()) {
                const auto d = decide_hom(a, t);
                witness = d.witness;
                j["verdict"] = d.yes ? "yes" : "no";
                text = std::string(d.yes ? "yes" : "no") + "\n";
                if (d.reason) {
                    j["reason"] = reason_name(d.reason->kind);
                    text += "reason: " + reason_name(d.reason->kind) + "\n";
                }
            } else {
                const std::int64_t k = bound > 0 ? bound : witness_bound(a);
                witness = brute_force_hom(a, k, t);
                j["verdict"] = witness ? "yes" : "no";
                j["bound"] = k;
                text = std::string(witness ? "yes" : "no") + " (K = " + std::to_string(k) + ")\n";
            }
            if (witness) {
                json w = json::array();
                for (int e = 0; e < a.size(); ++e) {
                    w.push_back({{"element", a.name(e)}, {"value", (*witness)[e].str()}});
                    text += a.name(e) + " -> " + (*witness)[e].str() + "\n";
                }
                j["witness"] = w;
            }
            print(as_json, j, text);
            return witness ? 0 : 1;
        }
        if (emit->parsed()) {
            Mso out;
            json j;
            if (!core.empty()) {
                out = emit_core_formula(parse_core_kind(core),
                                        MsoBinary{parse_mso(text_or_file(edge_text)), edge_vars[0], edge_vars[1]});
            } else if (!hom_target.empty()) {
                std::set<RelationSymbol> sigma;
                if (!structure_path.empty()) sigma = load_structure().signature();
                std::stringstream ss(formula);
                std::string tok;
                while (ss >> tok) sigma.insert(parse_relation_token(tok, 2));
                const auto parts = emit_hom_sentence_parts(sigma, parse_hom_target(hom_target));
                out = parts.sentence;
                j["set_vars"] = parts.set_vars;
            } else if (!alpha_text.empty()) {
                const Formula f = parse_path_formula(text_or_file(model_path));
                const auto table = make_abstraction_table(f);
                const auto vars = variables_of(f);
                auto enc = emit_tree_encoding(parse_mso(text_or_file(alpha_text)), static_cast<int>(vars.size()), branching,
                                              table, vars, propositions_of(f));
                j["beta"] = to_string(enc.beta);
                out = enc.alpha_e;
                if (!as_json) std::cout << "; beta\n" << (pretty ? to_pretty_string(enc.beta) : to_string(enc.beta)) << "\n; alpha_e\n";
            } else {
                throw InputError("emit-mso needs --core, --hom or --alpha");
            }
            j["formula"] = to_string(out);
            j["class"] = class_name(classify(out));
            j["size"] = mso_size(out);
            print(as_json, j, (pretty ? to_pretty_string(out) : to_string(out)) + "\n");
            return 0;
        }
        if (evalm->parsed()) {
            const auto a = load_structure();
            const Mso f = parse_mso(text_or_file(formula));
            MsoEvalOptions opt;
            opt.max_set_elements = max_set;
            const bool v = eval_finite(f, a, parse_assignments(assignments, a), opt);
            print(as_json, {{"value", v}}, std::string(v ? "true" : "false") + "\n");
            return v ? 0 : 1;
        }
        if (mc->parsed()) {
            const auto c = parse_model(read_file(model_path));
            const auto dom = ConcreteDomain::by_name(domain);
            c.check_registers(dom);
            const Formula f = parse_formula(text_or_file(formula));
            const auto nodes = oracle ? check_ctl_oracle(c, f, dom) : check_ctlstar(c, f, dom);
            std::vector<std::string> names;
            for (int v : nodes) names.push_back(c.node(v));
            print(as_json, {{"nodes", names}, {"count", names.size()}}, join(names, " ") + "\n");
            return 0;
        }
        if (sat->parsed()) {
            const Formula f = parse_formula(text_or_file(formula));
            SatStats st;
            const auto m = find_model(f, ConcreteDomain::by_name(domain), max_nodes, range, full_sweep, &st);
            json j = {{"graphs", st.graphs}, {"checks", st.checks}};
            if (!m) {
                j["verdict"] = "NO-MODEL-WITHIN-BOUNDS";
                print(as_json, j, "NO-MODEL-WITHIN-BOUNDS\n");
                return 1;
            }
            j["verdict"] = "model";
            j["node"] = m->model.node(m->node);
            j["model"] = format_model(m->model);
            print(as_json, j, "# satisfied at " + m->model.node(m->node) + "\n" + format_model(m->model));
            return 0;
        }
        if (interp->parsed()) {
            const auto dom = ConcreteDomain::by_name(domain);
            const auto in = dom.interpretation();
            if (!in) throw DomainError("domain " + dom.name() + " has no interpretation into Z");
            const Formula f = apply_interpretation(*in, parse_path_formula(text_or_file(formula)));
            print(as_json, {{"formula", to_string(f)}}, to_string(f) + "\n");
            return 0;
        }
        if (selftest->parsed()) {
            acceptance::Options opt;
            opt.quick = quick;
            opt.seed = seed;
            json results = json::array();
            int failed = 0;
            acceptance::run_all(opt, [&](const acceptance::Result& r) {
                failed += !r.passed;
                if (as_json)
                    results.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
                else
                    std::cout << acceptance::format_result(r) << std::endl;
            });
            if (as_json)
                std::cout << json{{"criteria", results}, {"failed", failed}}.dump(2) << "\n";
            else
                std::cout << (10 - failed) << "/10 criteria passed\n";
            return failed == 0 ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
