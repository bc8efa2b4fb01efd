#ifndef EXDAG_RESTRUCTURE_HPP
#define EXDAG_RESTRUCTURE_HPP

#include "exdag/dag.hpp"

#include <cstddef>
#include <functional>
#include <unordered_map>

namespace exdag {

enum class WeightPolicy {
  unit,  // operands weigh 1, an inner node the number of operands below it
  depth, // subexpression depth (+1) in the surrounding DAG
};

/// A coefficient in a rewritten tree: the constants 0 and 1 are kept
/// symbolic so products and sums with them fold away.
struct Term {
  enum class Kind { zero, one, node };
  Kind kind = Kind::zero;
  NodeId id;
  bool negated = false;

  static Term zero() { return {}; }
  static Term one() { return {Kind::one, {}, false}; }
  static Term of(NodeId id) { return {Kind::node, id, false}; }

  bool is_zero() const { return kind == Kind::zero; }
  bool is_one() const { return kind == Kind::one && !negated; }
};

/// F / G with F, G division-free.
struct Fraction {
  Term f;
  Term g;
};

/// (A X + B) / (C X + D).
struct LinearFractional {
  Term a, b, c, d;

  static LinearFractional identity() {
    return {Term::one(), Term::zero(), Term::zero(), Term::one()};
  }
};

/// Weighted Brent rewriting of one operator tree. New nodes are appended to
/// `work`; operands are referenced, never copied. `resolve` maps an operand
/// to the node that currently stands for it (used when operands are roots
/// of trees already rewritten).
class TreeRewriter {
public:
  TreeRewriter(ExpressionDag &work, const OperatorTree &tree,
               WeightPolicy policy,
               std::function<NodeId(NodeId)> resolve = {});

  bool member(NodeId id) const { return parent_.contains(id); }
  double weight(NodeId id) const;

  /// Descends from x: left while the left child is a member with weight
  /// >= w and >= the right's weight, else right while the right child is a
  /// member with weight >= w, else stops.
  NodeId split(NodeId x, double w) const;
  /// Deepest strict ancestor of x, starting at r, whose weight is >= w.
  NodeId split_on_path(NodeId r, NodeId x, double w) const;

  Fraction compress(NodeId r);
  LinearFractional raise(NodeId r, NodeId x);

  /// Rewrites the whole tree: Div(F, G), or F alone when G is 1.
  NodeId build();

  Term add(Term x, Term y);
  Term sub(Term x, Term y) { return add(x, neg(y)); }
  Term mul(Term x, Term y);
  static Term neg(Term x);
  NodeId materialize(Term t);

private:
  Fraction combine(OpKind kind, const Fraction &x, const Fraction *y);
  LinearFractional product(const LinearFractional &m,
                           const LinearFractional &k);
  NodeId operand(NodeId id) const;
  NodeId constant(double v);

  ExpressionDag &work_;
  NodeId root_;
  std::function<NodeId(NodeId)> resolve_;
  std::unordered_map<NodeId, NodeId> parent_; // members -> tree parent
  std::unordered_map<NodeId, double> weight_; // members and operands
  std::unordered_map<double, NodeId> constants_;
};

struct RestructureResult {
  ExpressionDag dag;
  int depth_before = 0;
  int depth_after = 0;
  std::size_t trees = 0;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
};

/// Replaces every maximal operator tree with its rewritten form. Blocking
/// nodes and operands are kept as they are; the root value is unchanged.
RestructureResult restructure(const ExpressionDag &dag, WeightPolicy policy);

} // namespace exdag

#endif // EXDAG_RESTRUCTURE_HPP
