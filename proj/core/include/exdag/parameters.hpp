#ifndef EXDAG_PARAMETERS_HPP
#define EXDAG_PARAMETERS_HPP

#include <cmath>
#include <limits>

namespace exdag {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Error-propagation factors of one operation, stored as base-2 logarithms
/// (rounded up) so that huge or tiny enclosures never overflow. A factor of
/// zero (absent child) is -inf.
struct OperationConstants {
  double log2_left = kNegInf;
  double log2_right = kNegInf;

  double left() const { return std::exp2(log2_left); }
  double right() const { return std::exp2(log2_right); }
};

/// Accuracy increases at a node: the operation itself receives an error
/// budget of 2^(a + inc_v), each child is asked for accuracy a + inc_child.
/// Absent children carry -inf.
struct ParameterTriple {
  double inc_v = 0.0;
  double inc_l = kNegInf;
  double inc_r = kNegInf;
};

/// Slack subtracted from real-valued increases so the budget check holds
/// after floating-point rounding.
inline constexpr double kBudgetSlack = 1e-9;

/// Upward-rounded value of 2^inc_v + c_l 2^inc_l + c_r 2^inc_r.
double budget(const ParameterTriple &p, const OperationConstants &c);
/// The accuracy condition: budget(p, c) <= 1.
bool satisfies_budget(const ParameterTriple &p, const OperationConstants &c);

} // namespace exdag

#endif // EXDAG_PARAMETERS_HPP
