#include "exdag/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace exdag {
namespace {

constexpr std::array<OpKind, 4> kOps = {OpKind::add, OpKind::sub, OpKind::mul,
                                        OpKind::div};

class Builder {
public:
  explicit Builder(std::uint64_t seed) : rng_(seed) {}

  NodeId operand() {
    const NodeId x = dag_.make_leaf(random_operand_value(rng_));
    const NodeId y = dag_.make_leaf(random_operand_value(rng_));
    const NodeId a = dag_.make_div(x, y);
    dag_.add_external_ref(a);
    return a;
  }

  OpKind random_op() {
    return kOps[std::uniform_int_distribution<int>(0, 3)(rng_)];
  }

  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::size_t pick(std::size_t size) {
    return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng_);
  }

  ExpressionDag &dag() { return dag_; }

private:
  std::mt19937_64 rng_;
  ExpressionDag dag_;
};

ExpressionDag chain(const GeneratorSpec &spec) {
  Builder b(spec.seed);
  NodeId res = b.operand();
  std::vector<NodeId> ops;
  for (int i = 0; i < spec.n; ++i) {
    const OpKind op = b.random_op();
    const NodeId a = b.operand();
    res = b.dag().make_op(op, res, a);
    ops.push_back(res);
  }
  if (spec.shape == Shape::blocking) {
    if (spec.blocking_count > 0) {
      const int k = spec.blocking_count;
      for (int i = 1; i <= k; ++i) {
        const auto at = static_cast<std::size_t>(
            static_cast<long long>(i) * spec.n / (k + 1));
        b.dag().add_external_ref(ops[std::min(at, ops.size() - 1)]);
      }
    } else {
      for (NodeId v : ops) {
        if (b.coin(spec.blocking_fraction)) {
          b.dag().add_external_ref(v);
        }
      }
    }
  }
  b.dag().set_root(res);
  return std::move(b.dag());
}

ExpressionDag balanced(const GeneratorSpec &spec) {
  Builder b(spec.seed);
  int k = 1;
  while ((2LL << k) - 1 <= spec.n) {
    ++k;
  }
  std::vector<NodeId> level;
  for (long long i = 0; i < (1LL << k); ++i) {
    level.push_back(b.operand());
  }
  while (level.size() > 1) {
    std::vector<NodeId> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(b.dag().make_op(b.random_op(), level[i], level[i + 1]));
    }
    level = std::move(next);
  }
  b.dag().set_root(level.front());
  return std::move(b.dag());
}

ExpressionDag self_add(const GeneratorSpec &spec) {
  Builder b(spec.seed);
  NodeId x = b.operand();
  for (int i = 0; i < spec.n; ++i) {
    x = b.dag().make_add(x, x);
  }
  b.dag().set_root(x);
  return std::move(b.dag());
}

ExpressionDag shared(const GeneratorSpec &spec) {
  Builder b(spec.seed);
  std::vector<NodeId> forest, built;
  for (int i = 0; i <= spec.n; ++i) {
    forest.push_back(b.operand());
  }
  built = forest;
  auto take = [&] {
    const std::size_t i = b.pick(forest.size());
    const NodeId v = forest[i];
    forest[i] = forest.back();
    forest.pop_back();
    return v;
  };
  while (forest.size() > 1) {
    const NodeId x = take();
    // Reuse an already consumed subtree, or take a fresh one.
    const NodeId y = b.coin(spec.share_fraction) ? built[b.pick(built.size())]
                                                 : take();
    const OpKind op = x == y ? OpKind::add : b.random_op();
    const NodeId v = b.dag().make_op(op, x, y);
    forest.push_back(v);
    built.push_back(v);
  }
  b.dag().set_root(forest.front());
  return std::move(b.dag());
}

} // namespace

std::string_view to_string(Shape shape) noexcept {
  switch (shape) {
  case Shape::list:
    return "list";
  case Shape::blocking:
    return "blocking";
  case Shape::balanced:
    return "balanced";
  case Shape::self_add:
    return "self_add";
  case Shape::shared:
    return "shared";
  }
  return "?";
}

std::optional<Shape> parse_shape(std::string_view name) noexcept {
  for (Shape s : {Shape::list, Shape::blocking, Shape::balanced,
                  Shape::self_add, Shape::shared}) {
    if (to_string(s) == name) {
      return s;
    }
  }
  return std::nullopt;
}

double random_operand_value(std::mt19937_64 &rng) {
  const double m = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
  // Failures before the first success with p = 1/9 have mean 8.
  const int t = std::geometric_distribution<int>(1.0 / 9.0)(rng);
  const bool negative = std::bernoulli_distribution(0.5)(rng);
  return std::ldexp(m, negative ? -t : t);
}

ExpressionDag generate(const GeneratorSpec &spec) {
  if (spec.n < 1) {
    throw std::invalid_argument("generator needs n >= 1");
  }
  switch (spec.shape) {
  case Shape::list:
  case Shape::blocking:
    return chain(spec);
  case Shape::balanced:
    return balanced(spec);
  case Shape::self_add:
    return self_add(spec);
  case Shape::shared:
    return shared(spec);
  }
  throw std::invalid_argument("unknown shape");
}

} // namespace exdag
