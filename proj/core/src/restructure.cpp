#include "exdag/restructure.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace exdag {

TreeRewriter::TreeRewriter(ExpressionDag &work, const OperatorTree &tree,
                           WeightPolicy policy,
                           std::function<NodeId(NodeId)> resolve)
    : work_(work), root_(tree.root), resolve_(std::move(resolve)) {
  for (NodeId m : tree.members) {
    parent_.emplace(m, NodeId{});
  }
  // Members are sorted, so children come before their parents.
  for (NodeId m : tree.members) {
    const Node &n = work_[m];
    double sum = 0.0, deepest = 0.0;
    for_each_child(n, [&](NodeId c) {
      double w;
      if (member(c)) {
        parent_[c] = m;
        w = weight_.at(c);
      } else {
        w = policy == WeightPolicy::unit
                ? 1.0
                : work_[operand(c)].subtree_depth + 1.0;
        weight_[c] = w;
      }
      sum += w;
      deepest = std::max(deepest, w);
    });
    weight_[m] = policy == WeightPolicy::unit ? sum : deepest + 1.0;
  }
}

NodeId TreeRewriter::operand(NodeId id) const {
  return resolve_ ? resolve_(id) : id;
}

double TreeRewriter::weight(NodeId id) const {
  const auto it = weight_.find(id);
  if (it == weight_.end()) {
    throw std::out_of_range("node is not part of the tree");
  }
  return it->second;
}

NodeId TreeRewriter::split(NodeId x, double w) const {
  for (;;) {
    const Node &n = work_[x];
    const double wr = n.right.valid() ? weight(n.right) : 0.0;
    if (member(n.left) && weight(n.left) >= w && weight(n.left) >= wr) {
      x = n.left;
    } else if (n.right.valid() && member(n.right) && wr >= w) {
      x = n.right;
    } else {
      return x;
    }
  }
}

NodeId TreeRewriter::split_on_path(NodeId r, NodeId x, double w) const {
  std::vector<NodeId> path; // x's strict ancestors up to r, bottom-up
  for (NodeId v = parent_.at(x); v != r; v = parent_.at(v)) {
    if (!v.valid()) {
      throw std::invalid_argument("split target is not below the given node");
    }
    path.push_back(v);
  }
  NodeId y = r;
  for (auto it = path.rbegin(); it != path.rend() && weight(*it) >= w; ++it) {
    y = *it;
  }
  return y;
}

Term TreeRewriter::neg(Term x) {
  if (!x.is_zero()) {
    x.negated = !x.negated;
  }
  return x;
}

Term TreeRewriter::mul(Term x, Term y) {
  if (x.is_zero() || y.is_zero()) {
    return Term::zero();
  }
  const bool negated = x.negated != y.negated;
  Term r;
  if (x.kind == Term::Kind::one) {
    r = y;
  } else if (y.kind == Term::Kind::one) {
    r = x;
  } else {
    r = Term::of(work_.make_mul(x.id, y.id));
  }
  r.negated = negated;
  return r;
}

Term TreeRewriter::add(Term x, Term y) {
  if (x.is_zero()) {
    return y;
  }
  if (y.is_zero()) {
    return x;
  }
  auto bare = [&](Term t) {
    t.negated = false;
    return materialize(t);
  };
  if (x.negated == y.negated) {
    Term r = Term::of(work_.make_add(bare(x), bare(y)));
    r.negated = x.negated;
    return r;
  }
  // Exactly one side is negated: a - b.
  const Term &pos = x.negated ? y : x;
  const Term &negv = x.negated ? x : y;
  return Term::of(work_.make_sub(bare(pos), bare(negv)));
}

NodeId TreeRewriter::constant(double v) {
  const auto it = constants_.find(v);
  if (it != constants_.end()) {
    return it->second;
  }
  const NodeId id = work_.make_leaf(v);
  constants_.emplace(v, id);
  return id;
}

NodeId TreeRewriter::materialize(Term t) {
  switch (t.kind) {
  case Term::Kind::zero:
    return constant(0.0);
  case Term::Kind::one:
    return constant(t.negated ? -1.0 : 1.0);
  case Term::Kind::node:
    return t.negated ? work_.make_neg(t.id) : t.id;
  }
  return {};
}

Fraction TreeRewriter::combine(OpKind kind, const Fraction &x,
                               const Fraction *y) {
  switch (kind) {
  case OpKind::neg:
    return {neg(x.f), x.g};
  case OpKind::add:
    return {add(mul(x.f, y->g), mul(y->f, x.g)), mul(x.g, y->g)};
  case OpKind::sub:
    return {sub(mul(x.f, y->g), mul(y->f, x.g)), mul(x.g, y->g)};
  case OpKind::mul:
    return {mul(x.f, y->f), mul(x.g, y->g)};
  case OpKind::div:
    return {mul(x.f, y->g), mul(x.g, y->f)};
  default:
    throw std::logic_error("operation cannot appear in an operator tree");
  }
}

LinearFractional TreeRewriter::product(const LinearFractional &m,
                                       const LinearFractional &k) {
  return {add(mul(m.a, k.a), mul(m.b, k.c)), add(mul(m.a, k.b), mul(m.b, k.d)),
          add(mul(m.c, k.a), mul(m.d, k.c)), add(mul(m.c, k.b), mul(m.d, k.d))};
}

Fraction TreeRewriter::compress(NodeId r) {
  if (!member(r)) {
    return {Term::of(operand(r)), Term::one()};
  }
  const NodeId x = split(r, 0.5 * weight(r));
  const Node &n = work_[x];
  const Fraction x1 = compress(n.left);
  Fraction x2;
  if (n.right.valid()) {
    x2 = compress(n.right);
  }
  const Fraction fx = combine(n.kind, x1, n.right.valid() ? &x2 : nullptr);
  if (x == r) {
    return fx;
  }
  const LinearFractional m = raise(r, x);
  return {add(mul(m.a, fx.f), mul(m.b, fx.g)),
          add(mul(m.c, fx.f), mul(m.d, fx.g))};
}

LinearFractional TreeRewriter::raise(NodeId r, NodeId x) {
  if (r == x) {
    return LinearFractional::identity();
  }
  const NodeId y = split_on_path(r, x, 0.5 * (weight(r) + weight(x)));
  const Node &n = work_[y];
  // Y1 holds x; Y2 is the other operand, constant with respect to x.
  NodeId y1 = n.left;
  for (NodeId v = x; v != y; v = parent_.at(v)) {
    y1 = v;
  }
  const bool x_on_left = y1 == n.left;
  const LinearFractional inner = raise(y1, x);
  LinearFractional k = LinearFractional::identity();
  if (n.kind == OpKind::neg) {
    k.a = Term::one();
    k.a.negated = true;
  } else {
    const Fraction other = compress(x_on_left ? n.right : n.left);
    const Term &f = other.f;
    const Term &g = other.g;
    switch (n.kind) {
    case OpKind::add:
      k = {g, f, Term::zero(), g};
      break;
    case OpKind::sub:
      k = x_on_left ? LinearFractional{g, neg(f), Term::zero(), g}
                    : LinearFractional{neg(g), f, Term::zero(), g};
      break;
    case OpKind::mul:
      k = {f, Term::zero(), Term::zero(), g};
      break;
    case OpKind::div:
      k = x_on_left ? LinearFractional{g, Term::zero(), Term::zero(), f}
                    : LinearFractional{Term::zero(), f, g, Term::zero()};
      break;
    default:
      throw std::logic_error("operation cannot appear in an operator tree");
    }
  }
  const LinearFractional outer = raise(r, y);
  return product(outer, product(k, inner));
}

NodeId TreeRewriter::build() {
  Fraction fg = compress(root_);
  if (fg.g.negated) {
    fg.f = neg(fg.f);
    fg.g.negated = false;
  }
  if (fg.g.is_one()) {
    return materialize(fg.f);
  }
  return work_.make_div(materialize(fg.f), materialize(fg.g));
}

namespace {

// Copies the part of `work` reachable from `root` into a fresh DAG, routing
// every child edge through `resolve`.
ExpressionDag compact(const ExpressionDag &work, NodeId root,
                      const std::function<NodeId(NodeId)> &resolve) {
  ExpressionDag out;
  std::unordered_map<NodeId, NodeId> id_map;
  std::vector<std::pair<NodeId, bool>> stack{{resolve(root), false}};
  while (!stack.empty()) {
    auto [v, expanded] = stack.back();
    stack.pop_back();
    if (id_map.contains(v)) {
      continue;
    }
    const Node &n = work[v];
    if (!expanded) {
      stack.emplace_back(v, true);
      for_each_child(n, [&](NodeId c) {
        if (!id_map.contains(resolve(c))) {
          stack.emplace_back(resolve(c), false);
        }
      });
      continue;
    }
    NodeId id;
    if (n.is_leaf()) {
      id = out.make_leaf(n.value);
    } else {
      const NodeId l = id_map.at(resolve(n.left));
      std::optional<NodeId> r;
      if (n.right.valid()) {
        r = id_map.at(resolve(n.right));
      }
      id = out.make_op(n.kind, l, r, n.degree);
    }
    if (n.external_ref_count > 0) {
      out.add_external_ref(id, n.external_ref_count);
    }
    if (n.approx) {
      out.mark_evaluated(id, *n.approx);
    } else if (n.evaluated) {
      out.set_evaluated_flag(id, true);
    }
    id_map.emplace(v, id);
  }
  out.set_root(id_map.at(resolve(root)));
  return out;
}

} // namespace

RestructureResult restructure(const ExpressionDag &dag, WeightPolicy policy) {
  RestructureResult result;
  result.depth_before = dag.depth();
  result.nodes_before = dag.reachable().size();
  ExpressionDag work = dag;
  std::unordered_map<NodeId, NodeId> replaced;
  auto resolve = [&](NodeId id) {
    const auto it = replaced.find(id);
    return it == replaced.end() ? id : it->second;
  };
  std::vector<OperatorTree> trees = maximal_operator_trees(dag);
  std::sort(trees.begin(), trees.end(),
            [](const OperatorTree &a, const OperatorTree &b) {
              return a.root < b.root;
            });
  for (const OperatorTree &tree : trees) {
    if (tree.members.size() < 2) {
      continue;
    }
    TreeRewriter rewriter(work, tree, policy, resolve);
    const NodeId fresh = rewriter.build();
    const std::uint32_t ext = dag[tree.root].external_ref_count;
    if (ext > 0) {
      work.add_external_ref(fresh, ext);
    }
    replaced.emplace(tree.root, fresh);
    ++result.trees;
  }
  result.dag = compact(work, dag.root(), resolve);
  result.depth_after = result.dag.depth();
  result.nodes_after = result.dag.size();
  return result;
}

} // namespace exdag
