#ifndef EXDAG_BALANCE_HPP
#define EXDAG_BALANCE_HPP

#include "exdag/dag.hpp"
#include "exdag/log_weight.hpp"
#include "exdag/parameters.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace exdag {

/// Log-domain weight of every edge into each node: the operator count of the
/// node's tree expansion, counting duplicates. Leaves weigh zero. Indexed by
/// node id.
std::vector<LogWeight> full_count_weights(const ExpressionDag &dag);

/// i_v = -log w_all, i_x = log w_x - log w_all - log c_x with
/// w_all = 1 + w_l + w_r. A zero-weight child (a leaf) gets no budget share.
/// A small slack keeps the upward-rounded budget at or below 1.
ParameterTriple parameters_from_weights(LogWeight w_l, LogWeight w_r,
                                        const OperationConstants &c);

/// Depth-based split for a binary node with child subexpression depths d_l,
/// d_r (leaves have depth 0); the deeper side receives the larger share.
ParameterTriple depth_heuristic_parameters(int d_l, int d_r,
                                           const OperationConstants &c);
/// Unary counterpart: i_v = -log(d+1), i_l = log d - log(d+1) - log c_l.
ParameterTriple depth_heuristic_unary(int d, const OperationConstants &c);

/// depth_heuristic_parameters applied to every reachable node. On a
/// perfectly balanced tree this is the critical-path assignment
/// i_v = -log j, i_l = i_r = log(j-1) - log j - 1 at subexpression depth j.
std::vector<ParameterTriple>
depth_heuristic_assignment(const ExpressionDag &dag,
                           std::span<const OperationConstants> constants);

// Exact oracles for small DAGs. Constants are given per node id.

inline constexpr std::size_t kDefaultPathBudget = 1'000'000;

/// Unwidened operation constants of every node reachable from the root.
std::vector<OperationConstants> table_constants(const ExpressionDag &dag);

/// pcost(v) = sum over root-to-v paths of 2^fcost(P), where fcost is the sum
/// of log2 edge constants. Enumerates paths; throws OracleScopeError when
/// more than `budget` path prefixes are visited.
std::vector<double>
path_costs(const ExpressionDag &dag,
           std::span<const OperationConstants> constants,
           std::size_t budget = kDefaultPathBudget);

struct OptimalWeights {
  std::vector<double> node;  // wgt(v); 0 for leaves
  std::vector<double> left;  // weight of the edge to the left child
  std::vector<double> right; // weight of the edge to the right child
  std::vector<double> pcost;
};

/// Edge weights that split wgt(v) among v's incoming edges in proportion to
/// the path cost each edge carries; wgt(v) = 1 + w_l + w_r.
OptimalWeights optimal_path_weights(const ExpressionDag &dag,
                                    std::span<const OperationConstants> constants,
                                    std::size_t budget = kDefaultPathBudget);

/// Parameters from real weights, in plain double arithmetic (no slack).
std::vector<ParameterTriple>
optimal_parameters(const ExpressionDag &dag, const OptimalWeights &weights,
                   std::span<const OperationConstants> constants);

/// Requested precision -q - sum inc(e) - inc(v) per operator node, as the
/// maximum and minimum over all root-to-node paths.
struct Accumulation {
  std::vector<double> max_precision;
  std::vector<double> min_precision;
  std::vector<NodeId> operators;
  double total = 0.0;         // sum of max_precision over operators
  double critical_path = 0.0; // heaviest root-to-leaf path
};

Accumulation accumulate_precision(const ExpressionDag &dag,
                                  std::span<const ParameterTriple> params,
                                  double q);

/// n log n + sum_v log pcost(v) - n q over the n operator nodes.
double predicted_cost(const ExpressionDag &dag,
                      std::span<const OperationConstants> constants, double q,
                      std::size_t budget = kDefaultPathBudget);

/// k log k + k(k-1)/2 + constcost.
double balanced_cp_cost(int k, double constcost);

/// Critical-path split at a node whose children have depths d_l, d_r and
/// critical-path costs cost_l, cost_r. Solves
///   ((d_l+1)/d_l) z + c ((d_r+1)/d_r) z^(d_l/d_r) = 1,  c = 2^((cost_l-cost_r)/d_r)
/// by bisection; budget shares are then divided by the constants.
ParameterTriple solve_cp_split(int d_l, int d_r, double cost_l, double cost_r,
                               const OperationConstants &c);

} // namespace exdag

#endif // EXDAG_BALANCE_HPP
