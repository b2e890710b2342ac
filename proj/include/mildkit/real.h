#ifndef MILDKIT_REAL_H_
#define MILDKIT_REAL_H_

#include <mpfr.h>

#include <gmpxx.h>

#include <compare>
#include <string>

namespace mildkit {

using Integer = mpz_class;
using Rational = mpq_class;

inline constexpr int kDefaultPrecisionBits = 256;

// Parses "p/q" or "p". Decimal notation is rejected.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

Integer factorial(unsigned long n);
Rational rational_pow(const Rational& base, long exponent);

// Owning wrapper around an mpfr_t. Binary operations round to the larger
// of the two operand precisions.
class Real {
 public:
  explicit Real(int precision_bits = kDefaultPrecisionBits);
  Real(long value, int precision_bits);
  Real(double value, int precision_bits);
  Real(const Rational& value, int precision_bits);
  Real(const Integer& value, int precision_bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }
  int precision() const { return static_cast<int>(mpfr_get_prec(value_)); }

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  // Scientific notation with `digits` significant digits.
  std::string to_string(int digits = 30) const;

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);

  friend Real operator+(Real lhs, const Real& rhs) { return lhs += rhs; }
  friend Real operator-(Real lhs, const Real& rhs) { return lhs -= rhs; }
  friend Real operator*(Real lhs, const Real& rhs) { return lhs *= rhs; }
  friend Real operator/(Real lhs, const Real& rhs) { return lhs /= rhs; }
  friend Real operator*(Real lhs, const Rational& rhs);
  Real operator-() const;

  friend bool operator==(const Real& a, const Real& b) {
    return mpfr_equal_p(a.value_, b.value_) != 0;
  }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  static Real e(int precision_bits);

 private:
  mpfr_t value_;
};

Real abs(Real x);
Real exp(const Real& x);
Real log(const Real& x);
Real sqrt(const Real& x);
Real pow(const Real& base, const Real& exponent);
Real pow(const Real& base, long exponent);
Real pow(const Real& base, const Rational& exponent);
Real factorial_real(unsigned long n, int precision_bits);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
// 2^e at the given precision.
Real ldexp_one(long e, int precision_bits);

}  // namespace mildkit

#endif  // MILDKIT_REAL_H_
