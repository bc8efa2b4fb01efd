#include "exdag/log_weight.hpp"

#include <mpfr.h>

#include <array>
#include <cassert>
#include <numbers>
#include <utility>

namespace exdag {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact rounding error of x + y (TwoSum).
double two_sum_error(double x, double y, double s) {
  const double bb = s - x;
  return (x - (s - bb)) + (y - bb);
}

// table[i] >= 2^(2^-i) for i = 1..64, plus one ulp of slack.
const std::array<double, 65> &factor_table() {
  static const std::array<double, 65> table = [] {
    std::array<double, 65> t{};
    mpfr_t x;
    mpfr_init2(x, 53);
    for (int i = 1; i <= 64; ++i) {
      mpfr_set_ui_2exp(x, 1, -i, MPFR_RNDN);
      mpfr_exp2(x, x, MPFR_RNDU);
      t[i] = std::nextafter(mpfr_get_d(x, MPFR_RNDU), kInf);
    }
    mpfr_clear(x);
    t[0] = 2.0;
    return t;
  }();
  return table;
}

// 1 / ln 2, rounded up.
const double kInvLn2Up = std::nextafter(std::numbers::log2e, kInf);

} // namespace

double add_up(double x, double y) {
  const double s = x + y;
  if (std::isinf(s)) {
    return s;
  }
  return two_sum_error(x, y, s) > 0 ? std::nextafter(s, kInf) : s;
}

double sub_down(double x, double y) {
  const double s = x - y;
  if (std::isinf(s)) {
    return s;
  }
  return two_sum_error(x, -y, s) < 0 ? std::nextafter(s, -kInf) : s;
}

double mul_up(double x, double y) {
  const double p = x * y;
  if (std::isinf(p) || p == 0.0) {
    return p;
  }
  return std::fma(x, y, -p) > 0 ? std::nextafter(p, kInf) : p;
}

double exp2_neg_upper(double g) {
  assert(g >= 0);
  const double whole = std::ceil(g);
  if (whole > 1100) {
    return std::numeric_limits<double>::denorm_min();
  }
  // h = whole - g in [0, 1), rounded up when the subtraction is inexact.
  double h = whole - g;
  if (two_sum_error(whole, -g, h) > 0) {
    h = std::nextafter(h, kInf);
  }
  const auto &table = factor_table();
  double product = 1.0;
  double rest = h;
  for (int i = 1; i <= 64 && rest > 0; ++i) {
    const double digit = std::ldexp(1.0, -i);
    if (rest >= digit) {
      rest -= digit; // exact: digit is a leading bit of rest
      product = mul_up(product, table[i]);
    }
  }
  if (rest > 0) {
    product = mul_up(product, table[64]);
  }
  return std::ldexp(product, -static_cast<int>(whole));
}

double log2_upper_by_squaring(double y) {
  assert(y >= 1.0 && y <= 2.0);
  if (y >= 2.0) {
    return 1.0;
  }
  double result = 0.0;
  for (int k = 1; k <= kSquaringBits; ++k) {
    y = mul_up(y, y);
    if (y >= 2.0) {
      result += std::ldexp(1.0, -k);
      y *= 0.5;
    }
  }
  return result + std::ldexp(1.0, -kSquaringBits);
}

LogAddRegime log_add_regime(LogWeight a, LogWeight b) {
  if (a.is_zero() || b.is_zero()) {
    return LogAddRegime::degenerate;
  }
  if (a.lw < b.lw) {
    std::swap(a, b);
  }
  const double gap = sub_down(a.lw, b.lw);
  if (gap <= kSmallGapThreshold) {
    return LogAddRegime::small_gap;
  }
  if (gap > kLinearizationThreshold) {
    return LogAddRegime::linear;
  }
  return LogAddRegime::squaring;
}

LogWeight log_add(LogWeight a, LogWeight b) {
  if (a.is_zero()) {
    return b;
  }
  if (b.is_zero()) {
    return a;
  }
  if (a.lw < b.lw) {
    std::swap(a, b);
  }
  const double gap = sub_down(a.lw, b.lw);
  if (gap <= kSmallGapThreshold) {
    return {add_up(a.lw, 1.0)};
  }
  const double r = exp2_neg_upper(gap);
  if (gap > kLinearizationThreshold) {
    return {add_up(a.lw, mul_up(r, kInvLn2Up))};
  }
  return {add_up(a.lw, log2_upper_by_squaring(add_up(1.0, r)))};
}

} // namespace exdag
