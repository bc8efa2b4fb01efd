#include "exdag/balance.hpp"

#include "exdag/enclosure.hpp"
#include "exdag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace exdag {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_neg_inf(double x) { return std::isinf(x) && x < 0; }

// i - log2 c, treating a zero constant as 1: a child whose error cannot
// reach the result still gets a finite request.
double shift(double i, double log2_c) {
  if (is_neg_inf(i)) {
    return i;
  }
  return is_neg_inf(log2_c) ? i : sub_down(i, log2_c);
}

double slack(double i) { return is_neg_inf(i) ? i : i - kBudgetSlack; }

double log2_or_neg_inf(double x) { return x > 0 ? std::log2(x) : -kInf; }

} // namespace

std::vector<LogWeight> full_count_weights(const ExpressionDag &dag) {
  std::vector<LogWeight> w(dag.size());
  for (std::size_t i = 0; i < dag.size(); ++i) {
    const Node &n = dag.nodes()[i];
    if (n.is_leaf()) {
      continue;
    }
    LogWeight children = w[n.left.index()];
    if (n.right.valid()) {
      children = log_add(children, w[n.right.index()]);
    }
    w[i] = log_add(LogWeight::one(), children);
  }
  return w;
}

ParameterTriple parameters_from_weights(LogWeight w_l, LogWeight w_r,
                                        const OperationConstants &c) {
  const double all = log_add(log_add(LogWeight::one(), w_l), w_r).lw;
  ParameterTriple p;
  p.inc_v = slack(-all);
  p.inc_l = w_l.is_zero() ? -kInf : slack(shift(sub_down(w_l.lw, all), c.log2_left));
  p.inc_r = w_r.is_zero() ? -kInf : slack(shift(sub_down(w_r.lw, all), c.log2_right));
  return p;
}

ParameterTriple depth_heuristic_parameters(int d_l, int d_r,
                                           const OperationConstants &c) {
  ParameterTriple p;
  if (d_l > d_r) {
    p.inc_v = p.inc_r = -std::log2(d_l + 1.0) - 1.0;
    p.inc_l = log2_or_neg_inf(d_l) - std::log2(d_l + 1.0);
  } else if (d_l < d_r) {
    p.inc_v = p.inc_l = -std::log2(d_r + 1.0) - 1.0;
    p.inc_r = log2_or_neg_inf(d_r) - std::log2(d_r + 1.0);
  } else {
    p.inc_v = -std::log2(d_l + 1.0);
    p.inc_l = p.inc_r = log2_or_neg_inf(d_l) - std::log2(d_l + 1.0) - 1.0;
  }
  p.inc_v = slack(p.inc_v);
  p.inc_l = slack(shift(p.inc_l, c.log2_left));
  p.inc_r = slack(shift(p.inc_r, c.log2_right));
  return p;
}

ParameterTriple depth_heuristic_unary(int d, const OperationConstants &c) {
  ParameterTriple p;
  p.inc_v = slack(-std::log2(d + 1.0));
  p.inc_l = slack(shift(log2_or_neg_inf(d) - std::log2(d + 1.0), c.log2_left));
  return p;
}

std::vector<ParameterTriple>
depth_heuristic_assignment(const ExpressionDag &dag,
                           std::span<const OperationConstants> constants) {
  std::vector<ParameterTriple> params(dag.size());
  for (NodeId v : dag.reachable()) {
    const Node &n = dag[v];
    const OperationConstants &c = constants[v.index()];
    if (n.is_leaf()) {
      continue;
    }
    const int d_l = dag[n.left].subtree_depth;
    params[v.index()] = n.right.valid()
                            ? depth_heuristic_parameters(
                                  d_l, dag[n.right].subtree_depth, c)
                            : depth_heuristic_unary(d_l, c);
  }
  return params;
}

std::vector<OperationConstants> table_constants(const ExpressionDag &dag) {
  const MagnitudeBounds bounds(dag);
  std::vector<OperationConstants> c(dag.size());
  for (NodeId v : dag.reachable()) {
    c[v.index()] = operation_constants(dag, v, bounds);
  }
  return c;
}

std::vector<double> path_costs(const ExpressionDag &dag,
                               std::span<const OperationConstants> constants,
                               std::size_t budget) {
  std::vector<double> pcost(dag.size(), 0.0);
  // Depth-first over path prefixes: (node, fcost of the path reaching it).
  std::vector<std::pair<NodeId, double>> stack{{dag.root(), 0.0}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto [v, f] = stack.back();
    stack.pop_back();
    if (++visited > budget) {
      throw OracleScopeError("more than " + std::to_string(budget) +
                             " root paths");
    }
    pcost[v.index()] += std::exp2(f);
    const Node &n = dag[v];
    if (n.left.valid()) {
      stack.emplace_back(n.left, f + constants[v.index()].log2_left);
    }
    if (n.right.valid()) {
      stack.emplace_back(n.right, f + constants[v.index()].log2_right);
    }
  }
  return pcost;
}

OptimalWeights optimal_path_weights(const ExpressionDag &dag,
                                    std::span<const OperationConstants> constants,
                                    std::size_t budget) {
  OptimalWeights w;
  w.pcost = path_costs(dag, constants, budget);
  w.node.assign(dag.size(), 0.0);
  w.left.assign(dag.size(), 0.0);
  w.right.assign(dag.size(), 0.0);
  // Share of wgt(child) carried by the edge from v.
  auto edge = [&](NodeId v, NodeId child, double log2_c) {
    if (w.pcost[child.index()] == 0.0) {
      return 0.0;
    }
    return w.pcost[v.index()] * std::exp2(log2_c) / w.pcost[child.index()] *
           w.node[child.index()];
  };
  for (NodeId v : dag.reachable()) {
    const Node &n = dag[v];
    if (n.is_leaf()) {
      continue;
    }
    const OperationConstants &c = constants[v.index()];
    w.left[v.index()] = edge(v, n.left, c.log2_left);
    if (n.right.valid()) {
      w.right[v.index()] = edge(v, n.right, c.log2_right);
    }
    w.node[v.index()] = 1.0 + w.left[v.index()] + w.right[v.index()];
  }
  return w;
}

std::vector<ParameterTriple>
optimal_parameters(const ExpressionDag &dag, const OptimalWeights &weights,
                   std::span<const OperationConstants> constants) {
  std::vector<ParameterTriple> params(dag.size());
  for (NodeId v : dag.reachable()) {
    const Node &n = dag[v];
    if (n.is_leaf()) {
      continue;
    }
    const std::size_t i = v.index();
    const double all = std::log2(weights.node[i]);
    ParameterTriple &p = params[i];
    p.inc_v = -all;
    p.inc_l = log2_or_neg_inf(weights.left[i]) - all - constants[i].log2_left;
    if (n.right.valid()) {
      p.inc_r =
          log2_or_neg_inf(weights.right[i]) - all - constants[i].log2_right;
    }
  }
  return params;
}

Accumulation accumulate_precision(const ExpressionDag &dag,
                                  std::span<const ParameterTriple> params,
                                  double q) {
  Accumulation acc;
  const std::vector<NodeId> order = dag.reachable();
  // Longest and shortest path sums of -inc(e) from the root.
  std::vector<double> hi(dag.size(), -kInf), lo(dag.size(), kInf);
  hi[dag.root().index()] = lo[dag.root().index()] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node &n = dag[*it];
    const ParameterTriple &p = params[it->index()];
    auto push = [&](NodeId child, double inc) {
      hi[child.index()] = std::max(hi[child.index()], hi[it->index()] - inc);
      lo[child.index()] = std::min(lo[child.index()], lo[it->index()] - inc);
    };
    if (n.left.valid()) {
      push(n.left, p.inc_l);
    }
    if (n.right.valid()) {
      push(n.right, p.inc_r);
    }
  }
  acc.max_precision.assign(dag.size(), 0.0);
  acc.min_precision.assign(dag.size(), 0.0);
  std::vector<double> path(dag.size(), 0.0);
  for (NodeId v : order) {
    const Node &n = dag[v];
    if (n.is_leaf()) {
      continue;
    }
    const std::size_t i = v.index();
    acc.max_precision[i] = -q + hi[i] - params[i].inc_v;
    acc.min_precision[i] = -q + lo[i] - params[i].inc_v;
    acc.operators.push_back(v);
    acc.total += acc.max_precision[i];
    double below = path[n.left.index()];
    if (n.right.valid()) {
      below = std::max(below, path[n.right.index()]);
    }
    path[i] = acc.max_precision[i] + below;
  }
  acc.critical_path = path[dag.root().index()];
  return acc;
}

double predicted_cost(const ExpressionDag &dag,
                      std::span<const OperationConstants> constants, double q,
                      std::size_t budget) {
  const std::vector<double> pcost = path_costs(dag, constants, budget);
  double n = 0.0, sum = 0.0;
  for (NodeId v : dag.reachable()) {
    if (!dag[v].is_leaf()) {
      n += 1.0;
      sum += std::log2(pcost[v.index()]);
    }
  }
  return n > 0 ? n * std::log2(n) + sum - n * q : 0.0;
}

double balanced_cp_cost(int k, double constcost) {
  return k * std::log2(static_cast<double>(k)) + k * (k - 1) / 2.0 + constcost;
}

ParameterTriple solve_cp_split(int d_l, int d_r, double cost_l, double cost_r,
                               const OperationConstants &c) {
  if (d_l < 1 || d_r < 1) {
    throw DegenerateSplit("critical-path split needs both depths >= 1");
  }
  const double d_f = static_cast<double>(d_l) / d_r;
  const double c_f = (cost_l - cost_r) / d_r;
  const double cc = std::exp2(c_f);
  if (!std::isfinite(cc) || cc <= 0) {
    throw DegenerateSplit("cost difference out of range");
  }
  auto share = [&](double z) { return z + cc * std::pow(z, d_f); };
  auto stationarity = [&](double z) {
    return (d_l + 1.0) / d_l * z + cc * (d_r + 1.0) / d_r * std::pow(z, d_f) -
           1.0;
  };
  // Largest z keeping the operation's own budget positive.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (share(mid) < 1.0 ? lo : hi) = mid;
  }
  const double z_max = lo;
  if (!(stationarity(z_max) > 0)) {
    throw DegenerateSplit("no root in the feasible range");
  }
  lo = 0.0;
  hi = z_max;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (stationarity(mid) < 0.0 ? lo : hi) = mid;
  }
  const double z = 0.5 * (lo + hi);
  ParameterTriple p;
  const double i_l = std::log2(z);
  p.inc_l = shift(i_l, c.log2_left);
  p.inc_r = shift(d_f * i_l + c_f, c.log2_right);
  p.inc_v = std::log2(1.0 - share(z));
  return p;
}

} // namespace exdag
