#include "random_dag.hpp"

#include "exdag/enclosure.hpp"
#include "exdag/errors.hpp"

#include <cmath>
#include <vector>

namespace exdag::testing {
namespace {

double random_leaf(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> m(1.0, 2.0);
  std::uniform_int_distribution<int> e(-3, 3);
  std::bernoulli_distribution neg(0.3);
  const double v = std::ldexp(m(rng), e(rng));
  return neg(rng) ? -v : v;
}

ExpressionDag attempt(std::mt19937_64 &rng, const RandomDagOptions &opts) {
  ExpressionDag dag;
  std::vector<NodeId> pool;
  const int leaves = 2 + static_cast<int>(rng() % 6);
  for (int i = 0; i < leaves; ++i) {
    pool.push_back(dag.make_leaf(random_leaf(rng)));
  }
  std::uniform_int_distribution<int> ops_dist(1, opts.max_ops);
  const int target = ops_dist(rng);
  std::bernoulli_distribution share(opts.share);
  std::bernoulli_distribution block(opts.blocking);
  // Recent nodes are preferred unless sharing is drawn, which keeps the
  // result mostly connected and lets old nodes gain extra parents.
  auto pick = [&]() -> NodeId {
    if (share(rng) || pool.size() < 3) {
      return pool[rng() % pool.size()];
    }
    const std::size_t k = std::min<std::size_t>(pool.size(), 3);
    return pool[pool.size() - 1 - rng() % k];
  };
  int made = 0;
  while (made < target) {
    const int kind = static_cast<int>(rng() % 12);
    NodeId v;
    if (kind < 2 && opts.negations) {
      v = dag.make_neg(pick());
    } else if (kind < 4 && opts.roots) {
      const int degree = 2 + static_cast<int>(rng() % 3);
      NodeId x = pick();
      if (degree % 2 == 0) {
        x = dag.make_add(dag.make_mul(x, x),
                         dag.make_leaf(std::abs(random_leaf(rng))));
        made += 2;
      }
      v = dag.make_root(x, degree);
    } else {
      static constexpr OpKind bin[] = {OpKind::add, OpKind::sub, OpKind::mul,
                                       OpKind::div};
      const OpKind op = bin[rng() % 4];
      NodeId x = pick(), y = pick();
      if (x == y && op != OpKind::add && op != OpKind::mul) {
        y = pool[rng() % pool.size()];
        if (x == y) {
          continue;
        }
      }
      v = dag.make_op(op, x, y);
    }
    ++made;
    if (block(rng)) {
      dag.add_external_ref(v);
    }
    pool.push_back(v);
  }
  return dag;
}

} // namespace

ExpressionDag random_dag(std::mt19937_64 &rng, const RandomDagOptions &opts) {
  for (;;) {
    ExpressionDag dag = attempt(rng, opts);
    try {
      MagnitudeBounds bounds(dag);
      // Keep values in a range where the reference needs few extra bits.
      const double mag = bounds[dag.root()].log2_abs_upper();
      if (mag < 200 && mag > -200) {
        return dag;
      }
    } catch (const EvaluationError &) {
    }
  }
}

ExpressionDag balanced_add_tree(int k) {
  ExpressionDag dag;
  std::vector<NodeId> level;
  for (int i = 0; i < (1 << k); ++i) {
    level.push_back(dag.make_leaf(1.0));
  }
  while (level.size() > 1) {
    std::vector<NodeId> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      next.push_back(dag.make_add(level[i], level[i + 1]));
    }
    level = next;
  }
  dag.set_root(level.front());
  return dag;
}

ExpressionDag add_chain(int n) {
  ExpressionDag dag;
  NodeId x = dag.make_leaf(1.0);
  for (int i = 0; i < n; ++i) {
    x = dag.make_add(x, dag.make_leaf(1.0));
  }
  return dag;
}

} // namespace exdag::testing
