#ifndef EXDAG_GENERATORS_HPP
#define EXDAG_GENERATORS_HPP

#include "exdag/dag.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace exdag {

enum class Shape { list, blocking, balanced, self_add, shared };

std::string_view to_string(Shape shape) noexcept;
std::optional<Shape> parse_shape(std::string_view name) noexcept;

struct GeneratorSpec {
  Shape shape = Shape::list;
  /// Operator count of the generated structure, operands not included.
  /// Balanced trees round down to 2^k - 1; shared DAGs grow to roughly
  /// n / (1 - share_fraction).
  int n = 64;
  std::uint64_t seed = 1;
  double blocking_fraction = 0.30;
  double share_fraction = 0.05;
  /// When positive, the blocking shape gets exactly this many blockers at
  /// equally spaced chain positions instead of random ones.
  int blocking_count = 0;
};

/// Random positive binary64 m 2^t with m uniform in [1, 2) and t a two-sided
/// geometric variable with E|t| = 8.
double random_operand_value(std::mt19937_64 &rng);

/// Builds the DAG described by `spec`; the same spec gives the same DAG.
/// Operands are Div(leaf, leaf) nodes holding one external reference.
ExpressionDag generate(const GeneratorSpec &spec);

} // namespace exdag

#endif // EXDAG_GENERATORS_HPP
