#ifndef EXDAG_EVALUATION_HPP
#define EXDAG_EVALUATION_HPP

#include "exdag/dag.hpp"
#include "exdag/parameters.hpp"

#include <cstdint>
#include <vector>

namespace exdag {

/// How a node splits its error budget between its own rounding error and
/// its children.
enum class ErrorPolicy {
  def, // fixed halves and quarters
  ebc, // weights = operator counts of the tree expansion
  ebd, // weights derived from subexpression depths
};

ParameterTriple default_parameters(OpKind kind, const OperationConstants &c);

inline constexpr mpfr_prec_t kDefaultPrecisionCap = mpfr_prec_t{1} << 24;

struct EvalOptions {
  ErrorPolicy policy = ErrorPolicy::def;
  int threads = 1;
  mpfr_prec_t precision_cap = kDefaultPrecisionCap;
  /// Store approximations in the DAG and flag nodes as evaluated.
  bool mark_evaluated = true;
};

struct NodeCost {
  NodeId id;
  /// Accuracy the node was computed to (log2 of the allowed error).
  double requested = 0.0;
  mpfr_prec_t precision = 0;
};

struct CostReport {
  /// One record per computed node, in ascending id order. Leaves cost 0.
  std::vector<NodeCost> nodes;
  std::uint64_t total_cost = 0;
  std::uint64_t critical_path_cost = 0;
  int depth = 0;
  double bounds_ms = 0.0;
  double demand_ms = 0.0;
  double compute_ms = 0.0;
};

struct EvalResult {
  Approximation value;
  CostReport report;
};

/// Approximates the root of `dag` to absolute error at most 2^q.
///
/// Requested accuracies are pushed from the root to the leaves first; a
/// shared node keeps the strictest request of all its parents. Every node is
/// then computed exactly once, bottom-up, with `threads` workers. The result
/// does not depend on the thread count.
EvalResult evaluate(ExpressionDag &dag, long q, const EvalOptions &options = {});

/// (total, critical path) recomputed from per-node precisions: the critical
/// path is the heaviest root-to-leaf path with node weight = precision.
std::pair<std::uint64_t, std::uint64_t> cost_summary(const ExpressionDag &dag,
                                                     const CostReport &report);

} // namespace exdag

#endif // EXDAG_EVALUATION_HPP
