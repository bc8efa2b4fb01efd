#include "exdag/dag.hpp"

#include "exdag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exdag {

std::string_view to_string(OpKind kind) noexcept {
  switch (kind) {
  case OpKind::leaf:
    return "leaf";
  case OpKind::neg:
    return "neg";
  case OpKind::add:
    return "add";
  case OpKind::sub:
    return "sub";
  case OpKind::mul:
    return "mul";
  case OpKind::div:
    return "div";
  case OpKind::root:
    return "root";
  }
  return "?";
}

int arity(OpKind kind) noexcept {
  switch (kind) {
  case OpKind::leaf:
    return 0;
  case OpKind::neg:
  case OpKind::root:
    return 1;
  default:
    return 2;
  }
}

NodeId ExpressionDag::make_leaf(double value) {
  if (!std::isfinite(value)) {
    throw DagError("leaf value must be finite");
  }
  Node n;
  n.kind = OpKind::leaf;
  n.value = value;
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeId ExpressionDag::make_op(OpKind kind, NodeId left,
                              std::optional<NodeId> right, int degree) {
  const int want = arity(kind);
  if (want == 0) {
    throw DagError("make_op cannot build a leaf");
  }
  if ((want == 2) != right.has_value()) {
    throw DagError(std::string(to_string(kind)) + " expects " +
                   std::to_string(want) + " child(ren)");
  }
  if (kind == OpKind::root && degree < 2) {
    throw DagError("root degree must be at least 2");
  }
  if (!contains(left)) {
    throw DagError("unknown child id " + std::to_string(left.value));
  }
  if (right && !contains(*right)) {
    throw DagError("unknown child id " + std::to_string(right->value));
  }

  Node n;
  n.kind = kind;
  n.degree = kind == OpKind::root ? degree : 0;
  n.left = left;
  LogWeight children = nodes_[left.index()].log_op_count;
  int depth = nodes_[left.index()].subtree_depth;
  ++nodes_[left.index()].parent_count;
  if (right) {
    n.right = *right;
    ++nodes_[right->index()].parent_count;
    children = log_add(children, nodes_[right->index()].log_op_count);
    depth = std::max(depth, nodes_[right->index()].subtree_depth);
  }
  n.subtree_depth = depth + 1;
  n.log_op_count = log_add(LogWeight::one(), children);
  nodes_.push_back(std::move(n));
  ++operator_count_;
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeId ExpressionDag::root() const {
  if (root_.valid()) {
    return root_;
  }
  if (nodes_.empty()) {
    throw DagError("empty expression dag has no root");
  }
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void ExpressionDag::set_root(NodeId id) {
  if (!contains(id)) {
    throw DagError("unknown root id " + std::to_string(id.value));
  }
  root_ = id;
}

void ExpressionDag::add_external_ref(NodeId id, std::uint32_t count) {
  mutable_node(id).external_ref_count += count;
}

void ExpressionDag::release_external_ref(NodeId id) {
  Node &n = mutable_node(id);
  if (n.external_ref_count == 0) {
    throw DagError("node " + std::to_string(id.value) +
                   " has no external reference to release");
  }
  --n.external_ref_count;
}

const Node &ExpressionDag::node(NodeId id) const {
  if (!contains(id)) {
    throw DagError("unknown node id " + std::to_string(id.value));
  }
  return nodes_[id.index()];
}

Node &ExpressionDag::mutable_node(NodeId id) {
  if (!contains(id)) {
    throw DagError("unknown node id " + std::to_string(id.value));
  }
  return nodes_[id.index()];
}

int ExpressionDag::depth() const { return node(root()).subtree_depth; }

std::vector<NodeId> ExpressionDag::reachable() const {
  return reachable(root());
}

std::vector<NodeId> ExpressionDag::reachable(NodeId from) const {
  std::vector<char> seen(from.index() + 1, 0);
  seen[from.index()] = 1;
  // Children precede parents, so one descending sweep marks everything.
  for (std::size_t i = from.index() + 1; i-- > 0;) {
    if (!seen[i]) {
      continue;
    }
    for_each_child(nodes_[i], [&](NodeId c) { seen[c.index()] = 1; });
  }
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) {
      out.push_back(NodeId{static_cast<std::uint32_t>(i)});
    }
  }
  return out;
}

void ExpressionDag::mark_evaluated(NodeId id, Approximation approx) {
  Node &n = mutable_node(id);
  n.evaluated = true;
  n.approx = std::move(approx);
}

void ExpressionDag::set_evaluated_flag(NodeId id, bool evaluated) {
  mutable_node(id).evaluated = evaluated;
}

bool is_tree_candidate(const ExpressionDag &dag, NodeId id) {
  const Node &n = dag.node(id);
  return !n.is_leaf() && n.kind != OpKind::root && !n.evaluated;
}

bool is_blocking(const ExpressionDag &dag, NodeId id) {
  return !is_tree_candidate(dag, id) || dag.node(id).reference_count() >= 2;
}

std::vector<OperatorTree> maximal_operator_trees(const ExpressionDag &dag) {
  const std::size_t n = dag.size();
  std::vector<NodeId> sole_parent(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId id{static_cast<std::uint32_t>(i)};
    for_each_child(dag.node(id), [&](NodeId c) { sole_parent[c.index()] = id; });
  }

  auto interior = [&](NodeId id) {
    const Node &nd = dag.node(id);
    return is_tree_candidate(dag, id) && nd.reference_count() == 1 &&
           nd.external_ref_count == 0 && sole_parent[id.index()].valid() &&
           is_tree_candidate(dag, sole_parent[id.index()]);
  };

  std::vector<OperatorTree> trees;
  std::vector<NodeId> stack;
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId id{static_cast<std::uint32_t>(i)};
    if (!is_tree_candidate(dag, id) || interior(id)) {
      continue;
    }
    OperatorTree tree{id, {}};
    stack.assign(1, id);
    while (!stack.empty()) {
      const NodeId cur = stack.back();
      stack.pop_back();
      tree.members.push_back(cur);
      for_each_child(dag.node(cur), [&](NodeId c) {
        if (interior(c)) {
          stack.push_back(c);
        }
      });
    }
    std::sort(tree.members.begin(), tree.members.end());
    trees.push_back(std::move(tree));
  }
  return trees;
}

} // namespace exdag
