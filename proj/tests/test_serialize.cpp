#include "exdag/errors.hpp"
#include "exdag/serialize.hpp"

#include "random_dag.hpp"

#include <gtest/gtest.h>

using namespace exdag;
namespace tst = exdag::testing;

namespace {

int parse_error_line(const std::string &text) {
  try {
    parse(text);
  } catch (const ParseError &e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

} // namespace

TEST(Serialize, RoundTripRandomDags) {
  std::mt19937_64 rng(17);
  tst::RandomDagOptions opts;
  opts.blocking = 0.2;
  for (int i = 0; i < 200; ++i) {
    const ExpressionDag dag = tst::random_dag(rng, opts);
    const std::string text = serialize(dag);
    const ExpressionDag back = parse(text);
    // Ids are renumbered once; after that the text is a fixed point.
    const std::string again = serialize(back);
    ASSERT_EQ(serialize(parse(again)), again);
    ASSERT_EQ(back.depth(), dag.depth());
    ASSERT_EQ(back.reachable().size(), dag.reachable().size());
  }
}

TEST(Serialize, KeepsExactLeafBits) {
  ExpressionDag dag;
  dag.make_add(dag.make_leaf(0.1), dag.make_leaf(-3.0e-300));
  const ExpressionDag back = parse(serialize(dag));
  const Node &top = back[back.root()];
  EXPECT_EQ(back[top.left].value, 0.1);
  EXPECT_EQ(back[top.right].value, -3.0e-300);
}

TEST(Serialize, ExternalReferencesSurvive) {
  ExpressionDag dag;
  const NodeId a = dag.make_leaf(2.0);
  const NodeId r = dag.make_root(a, 3);
  dag.add_external_ref(r, 2);
  const ExpressionDag back = parse(serialize(dag));
  EXPECT_EQ(back[back.root()].external_ref_count, 2u);
  EXPECT_EQ(back[back.root()].degree, 3);
}

TEST(Parse, CommentsAndBlankLines) {
  const ExpressionDag dag = parse("# header\n\n10 = leaf 1.5\n"
                                  "11 = leaf 2\n12 = mul 10 11\nroot 12\n");
  EXPECT_EQ(dag.size(), 3u);
  EXPECT_EQ(dag[dag.root()].kind, OpKind::mul);
}

TEST(Parse, ForwardReferencesAreAllowed) {
  const ExpressionDag dag = parse("3 = add 1 2\n1 = leaf 1\n2 = leaf 2\nroot 3\n");
  EXPECT_EQ(dag[dag.root()].kind, OpKind::add);
}

TEST(Parse, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("1 = leaf 1\n1 = leaf 2\nroot 1\n"), 2);
  EXPECT_EQ(parse_error_line("1 = leaf 1\n2 = add 1 9\nroot 2\n"), 2);
  EXPECT_EQ(parse_error_line("1 = leaf 1\n2 = pow 1 1\nroot 2\n"), 2);
  EXPECT_EQ(parse_error_line("1 = leaf abc\nroot 1\n"), 1);
  EXPECT_EQ(parse_error_line("1 = leaf 1\n2 = root 1 1\nroot 2\n"), 2);
  EXPECT_EQ(parse_error_line("1 = leaf 1\n2 = neg 1 1\nroot 2\n"), 2);
  EXPECT_GT(parse_error_line("1 = leaf 1\n"), 0); // missing root
  EXPECT_EQ(parse_error_line("1 = leaf 1\nroot 4\n"), 2);
}

TEST(Parse, RejectsCycles) {
  EXPECT_THROW(parse("1 = leaf 1\n2 = add 1 3\n3 = neg 2\nroot 3\n"),
               ParseError);
  EXPECT_THROW(parse("1 = neg 1\nroot 1\n"), ParseError);
}

TEST(Dot, OneEdgeLinePerChildEdge) {
  ExpressionDag dag;
  const NodeId a = dag.make_leaf(1.0);
  const NodeId s = dag.make_add(a, a);
  dag.make_mul(s, a);
  const std::string dot = export_dot(dag);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("add@1"), std::string::npos);
  std::size_t edges = 0;
  for (std::size_t p = dot.find("->"); p != std::string::npos;
       p = dot.find("->", p + 2)) {
    ++edges;
  }
  EXPECT_EQ(edges, 4u);
}
