#include "exdag/enclosure.hpp"
#include "exdag/errors.hpp"
#include "exdag/evaluation.hpp"

#include "random_dag.hpp"
#include "reference.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace exdag;
namespace tst = exdag::testing;

namespace {

// |approx - reference| <= 2^q, with the reference computed far more precisely.
void expect_within(const Approximation &a, const ExpressionDag &dag, long q) {
  const BigFloat ref = tst::reference_value(dag, 4 * std::abs(q) + 400);
  EXPECT_LE(tst::log2_distance(a.value, ref), double(q));
  EXPECT_LE(a.error_log2, double(q));
}

} // namespace

TEST(Evaluate, OneThird) {
  ExpressionDag dag;
  dag.make_div(dag.make_leaf(1.0), dag.make_leaf(3.0));
  for (auto policy : {ErrorPolicy::def, ErrorPolicy::ebc, ErrorPolicy::ebd}) {
    ExpressionDag copy = dag;
    const auto r = evaluate(copy, -120, {.policy = policy});
    expect_within(r.value, dag, -120);
    EXPECT_GE(r.value.precision, 120);
  }
}

TEST(Evaluate, CancellationToZero) {
  ExpressionDag dag;
  const NodeId two = dag.make_leaf(2.0);
  const NodeId s = dag.make_root(two, 2);
  dag.make_sub(dag.make_mul(s, s), two);
  const auto r = evaluate(dag, -100);
  EXPECT_LE(r.value.value.log2_abs_upper(), -100.0);
  EXPECT_LE(r.value.error_log2, -100.0);
}

TEST(Evaluate, LongAddChain) {
  ExpressionDag dag = tst::add_chain(100);
  const auto r = evaluate(dag, -50);
  EXPECT_EQ(r.value.value.to_double(), 101.0);
  EXPECT_EQ(r.report.depth, 100);
}

TEST(Evaluate, LeafIsExact) {
  ExpressionDag dag;
  dag.make_leaf(0.75);
  const auto r = evaluate(dag, -10);
  EXPECT_EQ(r.value.value.to_double(), 0.75);
  EXPECT_EQ(r.report.total_cost, 0u);
}

TEST(DefaultParameters, Examples) {
  ExpressionDag dag;
  const NodeId x = dag.make_leaf(1.0), y = dag.make_leaf(2.0);
  dag.make_add(x, y);
  MagnitudeBounds b(dag);
  auto p = default_parameters(OpKind::add, operation_constants(dag, dag.root(), b));
  EXPECT_EQ(p.inc_v, -1.0);
  EXPECT_EQ(p.inc_l, -2.0);
  EXPECT_EQ(p.inc_r, -2.0);

  dag.make_div(x, y);
  b = MagnitudeBounds(dag);
  p = default_parameters(OpKind::div, operation_constants(dag, dag.root(), b));
  EXPECT_EQ(p.inc_v, -1.0);
  // Factors below 1 do not loosen the children's requests.
  EXPECT_EQ(p.inc_l, -2.0);
  EXPECT_EQ(p.inc_r, -2.0);

  dag.make_neg(x);
  b = MagnitudeBounds(dag);
  p = default_parameters(OpKind::neg, operation_constants(dag, dag.root(), b));
  EXPECT_EQ(p.inc_v, -1.0);
  EXPECT_EQ(p.inc_l, -1.0);
  EXPECT_TRUE(std::isinf(p.inc_r));
}

TEST(DefaultParameters, SatisfyBudget) {
  for (double cl : {-30.0, -1.5, 0.0, 0.3, 7.0, 40.0}) {
    for (double cr : {-12.0, 0.0, 2.5, 19.0}) {
      const OperationConstants c{cl, cr};
      for (auto k : {OpKind::add, OpKind::mul, OpKind::div}) {
        EXPECT_TRUE(satisfies_budget(default_parameters(k, c), c));
      }
      EXPECT_TRUE(satisfies_budget(default_parameters(OpKind::root, {cl}), {cl}));
    }
  }
}

TEST(CostSummary, HandBuiltReports) {
  // Chain: a + b at 10 bits feeding c * (a + b) at 20 bits.
  ExpressionDag dag;
  const NodeId a = dag.make_leaf(1.0), b = dag.make_leaf(2.0);
  const NodeId s = dag.make_add(a, b);
  const NodeId m = dag.make_mul(dag.make_leaf(3.0), s);
  CostReport rep;
  rep.nodes = {{s, 0.0, 10}, {m, 0.0, 20}};
  EXPECT_EQ(cost_summary(dag, rep), std::make_pair(std::uint64_t{30}, std::uint64_t{30}));

  // Two independent branches under one Add: path takes the heavier one.
  ExpressionDag wide;
  const NodeId l = wide.make_mul(wide.make_leaf(1.0), wide.make_leaf(1.0));
  const NodeId r = wide.make_mul(wide.make_leaf(1.0), wide.make_leaf(1.0));
  const NodeId top = wide.make_add(l, r);
  rep.nodes = {{l, 0.0, 7}, {r, 0.0, 40}, {top, 0.0, 5}};
  EXPECT_EQ(cost_summary(wide, rep), std::make_pair(std::uint64_t{52}, std::uint64_t{45}));
}

TEST(Evaluate, ReportMatchesSummary) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    ExpressionDag dag = tst::random_dag(rng, {});
    const auto r = evaluate(dag, -200, {.policy = ErrorPolicy::ebc});
    const auto [total, cp] = cost_summary(dag, r.report);
    EXPECT_EQ(total, r.report.total_cost);
    EXPECT_EQ(cp, r.report.critical_path_cost);
    EXPECT_LE(cp, total);
  }
}

TEST(Evaluate, IndependentOfThreadCount) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const ExpressionDag dag = tst::random_dag(rng, {.max_ops = 80});
    for (auto policy : {ErrorPolicy::def, ErrorPolicy::ebc, ErrorPolicy::ebd}) {
      ExpressionDag d1 = dag, d4 = dag;
      const auto r1 = evaluate(d1, -300, {.policy = policy, .threads = 1});
      const auto r4 = evaluate(d4, -300, {.policy = policy, .threads = 4});
      ASSERT_EQ(mpfr_equal_p(r1.value.value.get(), r4.value.value.get()), 1);
      ASSERT_EQ(r1.report.total_cost, r4.report.total_cost);
      ASSERT_EQ(r1.report.nodes.size(), r4.report.nodes.size());
    }
  }
}

TEST(Evaluate, EachNodeOnce) {
  // Heavy sharing: x_{k+1} = x_k + x_k.
  ExpressionDag dag;
  NodeId x = dag.make_leaf(1.0);
  for (int i = 0; i < 40; ++i) x = dag.make_add(x, x);
  const auto r = evaluate(dag, -64, {.threads = 3});
  EXPECT_EQ(r.report.nodes.size(), 41u); // leaf included
  for (std::size_t i = 1; i < r.report.nodes.size(); ++i) {
    EXPECT_LT(r.report.nodes[i - 1].id, r.report.nodes[i].id);
  }
  EXPECT_EQ(r.value.value.to_double(), std::ldexp(1.0, 40));
}

TEST(Evaluate, MarksEvaluatedNodes) {
  ExpressionDag dag = tst::add_chain(5);
  evaluate(dag, -20);
  for (NodeId v : dag.reachable()) {
    if (dag[v].is_leaf()) continue;
    EXPECT_TRUE(dag[v].evaluated);
    EXPECT_TRUE(dag[v].approx.has_value());
  }
  ExpressionDag fresh = tst::add_chain(5);
  evaluate(fresh, -20, {.mark_evaluated = false});
  EXPECT_FALSE(fresh[fresh.root()].evaluated);
}

TEST(Evaluate, PrecisionCap) {
  ExpressionDag dag;
  dag.make_div(dag.make_leaf(1.0), dag.make_leaf(3.0));
  EXPECT_THROW(evaluate(dag, -5000, {.precision_cap = 1000}), PrecisionOverflow);
}

TEST(Evaluate, ErrorsSurface) {
  ExpressionDag dag;
  const NodeId one = dag.make_leaf(1.0);
  dag.make_div(one, dag.make_sub(one, one));
  EXPECT_THROW(evaluate(dag, -10), DivisionByZero);
}

TEST(Evaluate, SoundOnRandomDags) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 150; ++i) {
    const ExpressionDag dag = tst::random_dag(rng, {});
    for (long q : {-30L, -250L}) {
      for (auto policy : {ErrorPolicy::def, ErrorPolicy::ebc, ErrorPolicy::ebd}) {
        ExpressionDag copy = dag;
        const auto r = evaluate(copy, q, {.policy = policy});
        const BigFloat ref = tst::reference_value(dag, 4 * std::abs(q) + 600);
        ASSERT_LE(tst::log2_distance(r.value.value, ref), double(q))
            << "dag " << i << " q " << q;
        // Every node honours its own request.
        for (const auto &c : r.report.nodes) {
          if (copy[c.id].is_leaf()) continue;
          ASSERT_LE(copy[c.id].approx->error_log2, c.requested);
        }
      }
    }
  }
}
