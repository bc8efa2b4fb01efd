#ifndef EXDAG_LOG_WEIGHT_HPP
#define EXDAG_LOG_WEIGHT_HPP

#include <cmath>
#include <compare>
#include <limits>

namespace exdag {

/// A non-negative weight stored as an upper bound on its base-2 logarithm.
/// Weight zero is encoded as -inf. Tree-expansion operator counts grow
/// exponentially on DAGs with sharing, so they never leave the log domain.
struct LogWeight {
  double lw = -std::numeric_limits<double>::infinity();

  static constexpr LogWeight zero() noexcept { return {}; }
  static constexpr LogWeight one() noexcept { return {0.0}; }

  bool is_zero() const noexcept { return std::isinf(lw) && lw < 0; }

  friend auto operator<=>(const LogWeight &, const LogWeight &) = default;
};

enum class LogAddRegime {
  degenerate, // one operand is weight zero
  small_gap,  // a - b <= kSmallGapThreshold: return a + 1
  squaring,   // repeated-squaring bound on log2(1 + 2^(b-a))
  linear,     // a - b > kLinearizationThreshold: a + 2^(b-a) / ln 2
};

inline constexpr double kSmallGapThreshold = 0.2;
inline constexpr double kLinearizationThreshold = 16.0;
/// Number of result bits produced by repeated squaring.
inline constexpr int kSquaringBits = 44;

/// Upper bound on log2(2^a + 2^b).
LogWeight log_add(LogWeight a, LogWeight b);
LogAddRegime log_add_regime(LogWeight a, LogWeight b);

/// Upper bound on 2^(-g) for g >= 0, built from the factor table.
double exp2_neg_upper(double g);
/// Upper bound on log2(y) for y in [1, 2], by repeated squaring.
double log2_upper_by_squaring(double y);

// Directed-rounding helpers built on error-free transformations; the
// current floating-point rounding mode is never touched.
double add_up(double x, double y);
double sub_down(double x, double y);
double mul_up(double x, double y);

} // namespace exdag

#endif // EXDAG_LOG_WEIGHT_HPP
