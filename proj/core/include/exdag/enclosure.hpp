#ifndef EXDAG_ENCLOSURE_HPP
#define EXDAG_ENCLOSURE_HPP

#include "exdag/bigfloat.hpp"
#include "exdag/dag.hpp"
#include "exdag/parameters.hpp"

#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace exdag {

inline constexpr mpfr_prec_t kEnclosurePrecision = 64;
/// Precision doublings tried before giving up on separating a value from 0.
inline constexpr int kMaxRefinements = 8;

/// Closed interval [lo, hi] guaranteed to contain a node's exact value.
struct Interval {
  BigFloat lo;
  BigFloat hi;

  static Interval point(double v);

  bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
  bool is_zero() const { return lo.is_zero() && hi.is_zero(); }
  /// Contains zero without being exactly zero: the sign is undecided.
  bool straddles_zero() const { return contains_zero() && !is_zero(); }

  /// Upper bound on log2 max|x| over the interval (-inf for [0, 0]).
  double log2_abs_upper() const;
  /// Lower bound on log2 min|x| (-inf when the interval contains 0).
  double log2_abs_lower() const;
  /// Outward-rounded binary64 endpoints (may be infinite for huge values).
  std::pair<double, double> to_doubles() const;
};

/// Enclosures of every node reachable from a root, computed bottom-up in
/// outward-rounded interval arithmetic. Divisors and radicands whose
/// enclosure straddles zero are recomputed at doubled precision, up to
/// kMaxRefinements times.
///
/// Throws DivisionByZero for an exactly zero divisor, DomainError for an even
/// root of an exactly negative value, and SeparationError when refinement
/// cannot decide the sign.
class MagnitudeBounds {
public:
  explicit MagnitudeBounds(const ExpressionDag &dag);
  MagnitudeBounds(const ExpressionDag &dag, NodeId root);

  bool has(NodeId id) const {
    return id.index() < bounds_.size() && bounds_[id.index()].has_value();
  }
  const Interval &operator[](NodeId id) const;

private:
  std::vector<std::optional<Interval>> bounds_;
};

Interval magnitude_bounds(const ExpressionDag &dag, NodeId id);

/// The operation-dependent error factors, rounded upward:
///   neg (1, 0); add/sub (1, 1); mul (y_high, x_high);
///   div (1/y_low, x_high/y_low^2); d-th root ((1/d) x_low^((1-d)/d), 0).
/// Highs and lows are bounds on absolute values.
OperationConstants operation_constants(const ExpressionDag &dag, NodeId id,
                                       const MagnitudeBounds &bounds);

/// Constants the evaluator propagates errors with. They equal the factors
/// above evaluated on child enclosures widened by the largest error a child
/// may carry, and that error is enforced through per-child accuracy caps.
struct PropagationConstants {
  OperationConstants constants;
  double cap_l = std::numeric_limits<double>::infinity();
  double cap_r = std::numeric_limits<double>::infinity();
  /// A root of an exactly zero radicand: the value is 0, children unused.
  bool exact_zero = false;
};

PropagationConstants propagation_constants(const ExpressionDag &dag, NodeId id,
                                           const MagnitudeBounds &bounds);

} // namespace exdag

#endif // EXDAG_ENCLOSURE_HPP
