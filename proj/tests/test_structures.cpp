#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ctlz/model.hpp"
#include "ctlz/parser.hpp"
#include "ctlz/rewrite.hpp"
#include "ctlz/structure.hpp"

using namespace ctlz;

namespace {

std::string sample(const std::string& name) {
    std::ifstream in(std::string(CTLZ_SAMPLES_DIR) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AbstractionTable tree_table() {
    return make_abstraction_table(parse_path_formula("lt(x1, X^1 x2) & eq(X^1 x1, X^1 x2)"), "p", 1);
}

bool has_tuple(const SigmaStructure& s, const RelationSymbol& r, const std::vector<std::string>& names) {
    Tuple t;
    for (const auto& n : names) t.push_back(s.index_of(n));
    return s.holds(r, t);
}

}  // namespace

TEST(ModelFile, SelfLoop) {
    const auto m = parse_model("SHAPE graph\nVARS x\nNODES\nv\nEDGES\nv v\nREGISTERS\nv x 3\n");
    EXPECT_EQ(m.size(), 1);
    EXPECT_EQ(m.reg(0, 0), Element{Rational(3)});
}

TEST(ModelFile, MissingSuccessor) {
    try {
        parse_model("SHAPE graph\nVARS x\nNODES\na b\nEDGES\na b\nREGISTERS\na x 0\nb x 0\n");
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("no successor"), std::string::npos) << e.what();
    }
}

TEST(ModelFile, TreeShape) {
    const auto t = parse_model(sample("constraint_tree.model"));
    EXPECT_EQ(t.shape(), ConstraintKripke::Shape::Tree);
    EXPECT_EQ(t.size(), 15);
    EXPECT_EQ(t.branching(), 2);
    EXPECT_EQ(t.depth(), 3);
}

TEST(ModelFile, RoundTrip) {
    for (const char* name : {"constraint_tree.model", "two_cycle.model"}) {
        const auto m = parse_model(sample(name));
        EXPECT_EQ(format_model(parse_model(format_model(m))), format_model(m)) << name;
    }
}

TEST(ModelFile, Errors) {
    EXPECT_THROW(parse_model("SHAPE graph\nVARS x\nNODES\nv\nEDGES\nv w\nREGISTERS\nv x 0\n"), Error);
    EXPECT_THROW(parse_model("SHAPE graph\nVARS x\nNODES\nv\nEDGES\nv v\n"), ModelError);
    EXPECT_THROW(parse_model("SHAPE graph\nVARS x\nNODES\nv\nEDGES\nv v\nREGISTERS\nv y 0\n"), Error);
    EXPECT_THROW(parse_model("SHAPE graph\nVARS x\nNODES\n__v\nEDGES\n__v __v\nREGISTERS\n__v x 0\n"), ParseError);
}

TEST(StructureFile, RoundTrip) {
    for (const char* name : {"cycle.struct", "modular_chain.struct", "dense_gap.struct"}) {
        const auto s = parse_structure(sample(name));
        EXPECT_EQ(parse_structure(format_structure(s)), s) << name;
    }
}

TEST(StructureFile, Errors) {
    EXPECT_THROW(parse_structure("RELATION lt\na b\n"), ParseError);
    EXPECT_THROW(parse_structure("ELEMENTS\na\nRELATION lt\na\n"), ParseError);
    EXPECT_THROW(parse_structure("ELEMENTS\na\nRELATION lt\na b\n"), ParseError);
    EXPECT_THROW(parse_structure("ELEMENTS\na a\n"), ParseError);
}

TEST(AbstractModel, DepthOneChildren) {
    const auto t = abstract_model(parse_model(sample("constraint_tree.model")), tree_table(), ConcreteDomain::by_name("N"));
    EXPECT_EQ(t.labels(t.index_of("1")), (std::set<std::string>{"p1", "p2"}));
    EXPECT_EQ(t.labels(t.index_of("2")), (std::set<std::string>{"p1"}));
    EXPECT_TRUE(t.labels(t.index_of("eps")).empty());
}

TEST(AbstractModel, EmptyTableKeepsLabels) {
    const auto c = parse_model(sample("constraint_tree.model"));
    EXPECT_EQ(format_model(abstract_model(c, {}, ConcreteDomain::by_name("N"))), format_model(c));
}

TEST(AbstractModel, Chain) {
    auto c = ConstraintKripke::tree(1, 1, {"x"});
    c.set_register(c.index_of("eps"), "x", {Rational(0)});
    c.set_register(c.index_of("1"), "x", {Rational(1)});
    const auto table = make_abstraction_table(parse_path_formula("lt(x, X^1 x)"), "p", 0);
    const auto a = abstract_model(c, table, ConcreteDomain::by_name("Z"));
    EXPECT_TRUE(a.labels(a.index_of("eps")).empty());
    EXPECT_EQ(a.labels(a.index_of("1")), (std::set<std::string>{"p0"}));

    const auto g = extract_constraint_graph(a, table, {"x"});
    EXPECT_TRUE(has_tuple(g, RelationSymbol::less(), {"eps:x", "1:x"}));
    EXPECT_EQ(g.relations().at(RelationSymbol::less()).size(), 1u);
}

TEST(ExtractGraph, ConstraintTree) {
    const auto table = tree_table();
    const auto t = abstract_model(parse_model(sample("constraint_tree.model")), table, ConcreteDomain::by_name("N"));
    const auto g = extract_constraint_graph(t, table, {"x1", "x2"});
    EXPECT_EQ(g.size(), 30);
    EXPECT_TRUE(has_tuple(g, RelationSymbol::less(), {"eps:x1", "1:x2"}));
    EXPECT_TRUE(has_tuple(g, RelationSymbol::equal(), {"1:x1", "1:x2"}));
}

TEST(ExtractGraph, NoPropositions) {
    const auto table = tree_table();
    const auto t = parse_model(sample("constraint_tree.model"));
    const auto g = extract_constraint_graph(t, table, {"x1", "x2"});
    for (const auto& [r, ts] : g.relations()) EXPECT_TRUE(ts.empty()) << r.token();
}

TEST(Structure, Induced) {
    const auto s = parse_structure(sample("modular_chain.struct"));
    const auto sub = s.induced({s.index_of("a"), s.index_of("b")});
    EXPECT_EQ(sub.size(), 2);
    EXPECT_TRUE(has_tuple(sub, RelationSymbol::less(), {"a", "b"}));
    EXPECT_EQ(sub.relations().at(RelationSymbol::less()).size(), 1u);
    EXPECT_TRUE(sub.relations().at(RelationSymbol::constant_eq(Rational(7))).empty());
}
