#ifndef EXDAG_RUNNER_HPP
#define EXDAG_RUNNER_HPP

#include "exdag/evaluation.hpp"
#include "exdag/generators.hpp"
#include "exdag/restructure.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace exdag {

/// def: no balancing; bru/brd: restructuring with unit/depth weights;
/// ebc/ebd: error-bound balancing by full count/depth; cmb: brd then ebc.
enum class Strategy { def, bru, brd, ebc, ebd, cmb };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// What a strategy does: an optional restructuring pass, then evaluation
/// under an error policy.
struct StrategyPlan {
  std::optional<WeightPolicy> restructure;
  ErrorPolicy policy = ErrorPolicy::def;
};

StrategyPlan plan(Strategy s) noexcept;

struct RunConfig {
  GeneratorSpec spec;
  Strategy strategy = Strategy::def;
  int threads = 1;
  long q = -2000;
  int repeats = 5;
};

struct ResultRow {
  std::string shape;
  int n = 0;
  std::uint64_t seed = 0;
  std::string strategy;
  int threads = 1;
  long q = 0;
  int repeat_index = 0;
  double wall_ms = 0.0;
  double restructure_ms = 0.0;
  std::uint64_t total_cost_bits = 0;
  std::uint64_t critical_path_bits = 0;
  int depth_before = 0;
  int depth_after = 0;
  std::string error; // empty on success
};

/// Called with the DAG about to be evaluated in the first repeat.
using DagObserver = std::function<void(const ExpressionDag &)>;

/// Repeat i uses seed spec.seed + i. Evaluation errors land in the row's
/// error field and the run continues.
std::vector<ResultRow> run(const RunConfig &config,
                           const DagObserver &observe = {});

/// Runs one repeat: generate, rewrite per strategy, evaluate.
ResultRow run_once(const RunConfig &config, int repeat_index,
                   const DagObserver &observe = {});

inline constexpr std::string_view kCsvHeader =
    "shape,n,seed,strategy,threads,q,repeat_index,wall_ms,restructure_ms,"
    "total_cost_bits,critical_path_bits,depth_before,depth_after,error";

void write_csv(std::ostream &out, const std::vector<ResultRow> &rows);

} // namespace exdag

#endif // EXDAG_RUNNER_HPP
