#ifndef EXDAG_BIGFLOAT_HPP
#define EXDAG_BIGFLOAT_HPP

#include <mpfr.h>

#include <string>

namespace exdag {

/// Owning handle around an mpfr_t. Copies preserve precision and value.
class BigFloat {
public:
  explicit BigFloat(mpfr_prec_t precision = 64);
  BigFloat(double value, mpfr_prec_t precision);
  BigFloat(const BigFloat &other);
  BigFloat(BigFloat &&other) noexcept;
  BigFloat &operator=(const BigFloat &other);
  BigFloat &operator=(BigFloat &&other) noexcept;
  ~BigFloat();

  mpfr_ptr get() noexcept { return value_; }
  mpfr_srcptr get() const noexcept { return value_; }

  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(value_); }
  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }
  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const {
    return mpfr_get_d(value_, rnd);
  }

  /// Upper bound on log2|x|; -inf for zero.
  double log2_abs_upper() const;
  /// Lower bound on log2|x|; -inf for zero.
  double log2_abs_lower() const;

  std::string to_string(int digits = 20) const;

private:
  mpfr_t value_;
};

} // namespace exdag

#endif // EXDAG_BIGFLOAT_HPP
