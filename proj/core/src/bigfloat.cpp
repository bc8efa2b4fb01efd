#include "exdag/bigfloat.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace exdag {

BigFloat::BigFloat(mpfr_prec_t precision) {
  mpfr_init2(value_, precision);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(double value, mpfr_prec_t precision) {
  mpfr_init2(value_, precision);
  mpfr_set_d(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat &other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat &&other) noexcept {
  // Leave `other` as a valid 2-bit zero so its destructor stays cheap.
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat &BigFloat::operator=(const BigFloat &other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat &BigFloat::operator=(BigFloat &&other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

double BigFloat::log2_abs_upper() const {
  if (is_zero()) {
    return -std::numeric_limits<double>::infinity();
  }
  mpfr_t t;
  mpfr_init2(t, 64);
  mpfr_abs(t, value_, MPFR_RNDU);
  mpfr_log2(t, t, MPFR_RNDU);
  const double r = mpfr_get_d(t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

double BigFloat::log2_abs_lower() const {
  if (is_zero()) {
    return -std::numeric_limits<double>::infinity();
  }
  mpfr_t t;
  mpfr_init2(t, 64);
  mpfr_abs(t, value_, MPFR_RNDD);
  mpfr_log2(t, t, MPFR_RNDD);
  const double r = mpfr_get_d(t, MPFR_RNDD);
  mpfr_clear(t);
  return r;
}

std::string BigFloat::to_string(int digits) const {
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, value_);
  return std::string(buf.data());
}

} // namespace exdag
