#include "exdag/enclosure.hpp"
#include "exdag/errors.hpp"

#include "random_dag.hpp"
#include "reference.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace exdag;
namespace tst = exdag::testing;

TEST(MagnitudeBounds, LeafIsExact) {
  ExpressionDag dag;
  const NodeId a = dag.make_leaf(3.0);
  const Interval iv = magnitude_bounds(dag, a);
  EXPECT_EQ(iv.to_doubles(), std::make_pair(3.0, 3.0));
}

TEST(MagnitudeBounds, ThirdIsTight) {
  ExpressionDag dag;
  const NodeId d = dag.make_div(dag.make_leaf(1.0), dag.make_leaf(3.0));
  const Interval iv = magnitude_bounds(dag, d);
  BigFloat third(300);
  mpfr_set_ui(third.get(), 1, MPFR_RNDN);
  mpfr_div_ui(third.get(), third.get(), 3, MPFR_RNDN);
  EXPECT_LE(mpfr_cmp(iv.lo.get(), third.get()), 0);
  EXPECT_GE(mpfr_cmp(iv.hi.get(), third.get()), 0);
  // Width at most 2 ulps of the 64-bit working precision.
  BigFloat w(128);
  mpfr_sub(w.get(), iv.hi.get(), iv.lo.get(), MPFR_RNDU);
  EXPECT_LE(w.log2_abs_upper(), -2.0 - 64 + 1 + 1e-9);
}

TEST(MagnitudeBounds, ExactZeroDivisor) {
  ExpressionDag dag;
  const NodeId one = dag.make_leaf(1.0);
  const NodeId z = dag.make_sub(one, one);
  dag.make_div(dag.make_leaf(5.0), z);
  EXPECT_THROW(MagnitudeBounds{dag}, DivisionByZero);
}

TEST(MagnitudeBounds, RefinementFindsExactZero) {
  // a*b - b*a is 0, but at 64 bits the products are inexact.
  ExpressionDag dag;
  const NodeId a = dag.make_leaf(1.0 / 3.0);
  const NodeId b = dag.make_leaf(0.1);
  const NodeId z = dag.make_sub(dag.make_mul(a, b), dag.make_mul(b, a));
  dag.make_div(a, z);
  EXPECT_THROW(MagnitudeBounds{dag}, DivisionByZero);
}

TEST(MagnitudeBounds, RefinementSeparatesTinyDivisor) {
  // (1 + 2^-100) - 1 needs more than 64 bits to show its sign.
  ExpressionDag dag;
  const NodeId one = dag.make_leaf(1.0);
  const NodeId tiny = dag.make_leaf(0x1p-100);
  const NodeId third = dag.make_div(one, dag.make_leaf(3.0));
  const NodeId lhs = dag.make_add(dag.make_add(third, tiny), one);
  const NodeId rhs = dag.make_add(third, one);
  const NodeId d = dag.make_sub(lhs, rhs);
  const NodeId q = dag.make_div(one, d);
  const MagnitudeBounds bounds(dag);
  EXPECT_GT(bounds[d].lo.sign(), 0);
  EXPECT_NEAR(bounds[q].log2_abs_upper(), 100.0, 1e-6);
}

TEST(MagnitudeBounds, UndecidableSignFails) {
  ExpressionDag dag;
  const NodeId one = dag.make_leaf(1.0);
  const NodeId three = dag.make_leaf(3.0);
  const NodeId t1 = dag.make_div(one, three);
  const NodeId t2 = dag.make_div(one, three);
  dag.make_root(dag.make_sub(t1, t2), 3);
  EXPECT_THROW(MagnitudeBounds{dag}, SeparationError);
}

TEST(MagnitudeBounds, EvenRootOfNegative) {
  ExpressionDag dag;
  dag.make_root(dag.make_leaf(-4.0), 2);
  EXPECT_THROW(MagnitudeBounds{dag}, DomainError);
  ExpressionDag odd;
  odd.make_root(odd.make_leaf(-8.0), 3);
  const Interval iv = magnitude_bounds(odd, odd.root());
  EXPECT_NEAR(iv.to_doubles().first, -2.0, 1e-15);
}

TEST(MagnitudeBounds, RootOfExactZero) {
  ExpressionDag dag;
  const NodeId one = dag.make_leaf(1.0);
  dag.make_root(dag.make_sub(one, one), 2);
  EXPECT_TRUE(magnitude_bounds(dag, dag.root()).is_zero());
}

TEST(MagnitudeBounds, EncloseRandomReferenceValues) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const ExpressionDag dag = tst::random_dag(rng, {});
    const Interval iv = magnitude_bounds(dag, dag.root());
    const BigFloat ref = tst::reference_value(dag, 2000);
    ASSERT_LE(mpfr_cmp(iv.lo.get(), ref.get()), 0);
    ASSERT_GE(mpfr_cmp(iv.hi.get(), ref.get()), 0);
  }
}

namespace {

OperationConstants constants_of(ExpressionDag &dag) {
  const MagnitudeBounds b(dag);
  return operation_constants(dag, dag.root(), b);
}

} // namespace

TEST(OperationConstants, AddSubNeg) {
  ExpressionDag dag;
  const NodeId x = dag.make_leaf(7.0), y = dag.make_leaf(-2.0);
  dag.make_add(x, y);
  auto c = constants_of(dag);
  EXPECT_EQ(c.log2_left, 0.0);
  EXPECT_EQ(c.log2_right, 0.0);
  dag.make_sub(x, y);
  c = constants_of(dag);
  EXPECT_EQ(c.left(), 1.0);
  EXPECT_EQ(c.right(), 1.0);
  dag.make_neg(x);
  c = constants_of(dag);
  EXPECT_EQ(c.left(), 1.0);
  EXPECT_EQ(c.right(), 0.0);
}

TEST(OperationConstants, Mul) {
  ExpressionDag dag;
  dag.make_mul(dag.make_leaf(2.0), dag.make_leaf(4.0));
  const auto c = constants_of(dag);
  EXPECT_NEAR(c.left(), 4.0, 1e-12);
  EXPECT_NEAR(c.right(), 2.0, 1e-12);
  EXPECT_GE(c.left(), 4.0);
  EXPECT_GE(c.right(), 2.0);
}

TEST(OperationConstants, Div) {
  ExpressionDag dag;
  dag.make_div(dag.make_leaf(1.0), dag.make_leaf(2.0));
  const auto c = constants_of(dag);
  EXPECT_NEAR(c.left(), 0.5, 1e-12);
  EXPECT_NEAR(c.right(), 0.25, 1e-12);
  EXPECT_GE(c.left(), 0.5);
  EXPECT_GE(c.right(), 0.25);
}

TEST(OperationConstants, DivScalesWithNumerator) {
  ExpressionDag dag;
  dag.make_div(dag.make_leaf(8.0), dag.make_leaf(2.0));
  EXPECT_NEAR(constants_of(dag).right(), 2.0, 1e-12);
}

TEST(OperationConstants, SquareRoot) {
  ExpressionDag dag;
  dag.make_root(dag.make_leaf(4.0), 2);
  const auto c = constants_of(dag);
  EXPECT_NEAR(c.left(), 0.25, 1e-12);
  EXPECT_GE(c.left(), 0.25);
  EXPECT_EQ(c.right(), 0.0);
}

TEST(PropagationConstants, CoverUnwidenedFactorsAndCapChildren) {
  ExpressionDag dag;
  const NodeId x = dag.make_leaf(3.0), y = dag.make_leaf(5.0);
  const NodeId m = dag.make_mul(x, y);
  const NodeId d = dag.make_div(x, y);
  const NodeId r = dag.make_root(y, 2);
  dag.make_add(dag.make_add(m, d), r);
  const MagnitudeBounds b(dag);
  for (NodeId v : {m, d, r}) {
    const auto table = operation_constants(dag, v, b);
    const auto wide = propagation_constants(dag, v, b);
    EXPECT_GE(wide.constants.log2_left, table.log2_left);
    EXPECT_LE(wide.constants.log2_left, table.log2_left + 0.1);
    if (v != r) {
      EXPECT_GE(wide.constants.log2_right, table.log2_right);
      EXPECT_LE(wide.constants.log2_right, table.log2_right + 0.1);
    }
  }
  EXPECT_NEAR(propagation_constants(dag, m, b).cap_r, std::log2(5.0) - 4, 1e-9);
  EXPECT_NEAR(propagation_constants(dag, d, b).cap_r, std::log2(5.0) - 4, 1e-9);
  EXPECT_NEAR(propagation_constants(dag, r, b).cap_l, std::log2(5.0) - 4, 1e-9);
}
