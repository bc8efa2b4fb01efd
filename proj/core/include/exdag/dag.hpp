#ifndef EXDAG_DAG_HPP
#define EXDAG_DAG_HPP

#include "exdag/bigfloat.hpp"
#include "exdag/log_weight.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace exdag {

enum class OpKind : std::uint8_t { leaf, neg, add, sub, mul, div, root };

std::string_view to_string(OpKind kind) noexcept;
/// Number of children a node of this kind carries.
int arity(OpKind kind) noexcept;

/// Index of a node inside one ExpressionDag. Children always have smaller
/// ids than their parents.
struct NodeId {
  static constexpr std::uint32_t invalid_value =
      std::numeric_limits<std::uint32_t>::max();

  std::uint32_t value = invalid_value;

  constexpr bool valid() const noexcept { return value != invalid_value; }
  constexpr std::size_t index() const noexcept { return value; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// A node's value to known absolute accuracy.
struct Approximation {
  BigFloat value;
  /// Upper bound on log2|value - exact|; -inf when exact.
  double error_log2 = -std::numeric_limits<double>::infinity();
  /// Integer exponent e with |value - exact| <= 2^e.
  long error_exponent = std::numeric_limits<long>::min();
  mpfr_prec_t precision = 0;
};

struct Node {
  OpKind kind = OpKind::leaf;
  double value = 0.0; // leaves only
  int degree = 0;     // root operations only
  NodeId left;
  NodeId right;
  std::uint32_t parent_count = 0;
  std::uint32_t external_ref_count = 0;
  bool evaluated = false;
  std::optional<Approximation> approx;
  int subtree_depth = 0;
  /// Upper bound on log2 of the operator count of the tree expansion.
  LogWeight log_op_count;

  bool is_leaf() const noexcept { return kind == OpKind::leaf; }
  std::uint32_t reference_count() const noexcept {
    return parent_count + external_ref_count;
  }
};

/// Append-only store of arithmetic nodes forming a rooted DAG. Construction
/// is single-writer; a finished DAG may be read from many threads.
class ExpressionDag {
public:
  NodeId make_leaf(double value);
  NodeId make_op(OpKind kind, NodeId left,
                 std::optional<NodeId> right = std::nullopt, int degree = 0);

  NodeId make_neg(NodeId x) { return make_op(OpKind::neg, x); }
  NodeId make_add(NodeId x, NodeId y) { return make_op(OpKind::add, x, y); }
  NodeId make_sub(NodeId x, NodeId y) { return make_op(OpKind::sub, x, y); }
  NodeId make_mul(NodeId x, NodeId y) { return make_op(OpKind::mul, x, y); }
  NodeId make_div(NodeId x, NodeId y) { return make_op(OpKind::div, x, y); }
  NodeId make_root(NodeId x, int degree) {
    return make_op(OpKind::root, x, std::nullopt, degree);
  }

  /// Root defaults to the most recently created node.
  NodeId root() const;
  void set_root(NodeId id);

  /// Handles held outside the DAG; they make a node blocking.
  void add_external_ref(NodeId id, std::uint32_t count = 1);
  void release_external_ref(NodeId id);

  const Node &node(NodeId id) const;
  const Node &operator[](NodeId id) const { return node(id); }
  bool contains(NodeId id) const noexcept {
    return id.valid() && id.index() < nodes_.size();
  }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  /// |E|: the number of non-leaf nodes in the store.
  std::size_t operator_count() const noexcept { return operator_count_; }
  /// Depth of the root's subexpression.
  int depth() const;
  LogWeight log_operator_count(NodeId id) const { return node(id).log_op_count; }

  /// Nodes reachable from the root, in ascending (topological) id order.
  std::vector<NodeId> reachable() const;
  std::vector<NodeId> reachable(NodeId from) const;

  void mark_evaluated(NodeId id, Approximation approx);
  void set_evaluated_flag(NodeId id, bool evaluated);

private:
  Node &mutable_node(NodeId id);

  std::vector<Node> nodes_;
  std::size_t operator_count_ = 0;
  NodeId root_;
};

/// Calls f(child) for each child edge of `node` (twice for Add(x, x)).
template <typename F> void for_each_child(const Node &node, F &&f) {
  if (node.left.valid()) {
    f(node.left);
  }
  if (node.right.valid()) {
    f(node.right);
  }
}

/// A maximal operator tree: root plus every member, root included.
struct OperatorTree {
  NodeId root;
  std::vector<NodeId> members;
};

/// A node that restructuring must treat as an opaque operand: a leaf, a root
/// operation, an evaluated node, or one with two or more references.
bool is_blocking(const ExpressionDag &dag, NodeId id);
/// Operator nodes that may belong to an operator tree.
bool is_tree_candidate(const ExpressionDag &dag, NodeId id);

std::vector<OperatorTree> maximal_operator_trees(const ExpressionDag &dag);

} // namespace exdag

template <> struct std::hash<exdag::NodeId> {
  std::size_t operator()(exdag::NodeId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif // EXDAG_DAG_HPP
