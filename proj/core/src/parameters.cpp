#include "exdag/parameters.hpp"

#include "exdag/log_weight.hpp"

namespace exdag {
namespace {

bool integral(double x) { return x == std::floor(x) && std::abs(x) < 1000; }

// Upper bound on c * 2^inc given log2 c. When both exponents are integers the
// term is an exact power of two; otherwise exp2 (faithful, not correctly
// rounded) and the rounding of the exponent sum are covered by a relative
// factor of 2^-40.
double term(double inc, double log2_c) {
  if ((std::isinf(inc) && inc < 0) || (std::isinf(log2_c) && log2_c < 0)) {
    return 0.0;
  }
  if (integral(inc) && integral(log2_c)) {
    return std::ldexp(1.0, static_cast<int>(inc + log2_c));
  }
  return mul_up(std::exp2(inc + log2_c), 1.0 + 0x1p-40);
}

} // namespace

double budget(const ParameterTriple &p, const OperationConstants &c) {
  double sum = term(p.inc_v, 0.0);
  sum = add_up(sum, term(p.inc_l, c.log2_left));
  sum = add_up(sum, term(p.inc_r, c.log2_right));
  return sum;
}

bool satisfies_budget(const ParameterTriple &p, const OperationConstants &c) {
  return budget(p, c) <= 1.0;
}

} // namespace exdag
