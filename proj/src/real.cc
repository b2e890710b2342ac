#include "mildkit/real.h"

#include <algorithm>
#include <regex>
#include <stdexcept>
#include <vector>

namespace mildkit {
namespace {

// Widen the exponent range once so that x^(-n) near 0 and exp(-x^(-alpha))
// underflow only where the true value is negligible.
struct ExponentRange {
  ExponentRange() {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
  }
};
const ExponentRange kExponentRange;

int wider(const Real& a, const Real& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

Rational parse_rational(const std::string& text) {
  static const std::regex kPattern(R"(\s*([+-]?\d+)(?:/(\d+))?\s*)");
  std::smatch match;
  if (!std::regex_match(text, match, kPattern)) {
    throw std::invalid_argument("not a rational of the form p/q: '" + text + "'");
  }
  Integer num(match[1].str().front() == '+' ? match[1].str().substr(1) : match[1].str());
  Integer den(1);
  if (match[2].matched) den = Integer(match[2].str());
  if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  Rational c(q);
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str() + "/1";
  return c.get_str();
}

Integer factorial(unsigned long n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

Rational rational_pow(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw std::domain_error("0 raised to a negative power");
    return rational_pow(Rational(1) / base, -exponent);
  }
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Real::Real(int precision_bits) {
  mpfr_init2(value_, precision_bits);
  mpfr_set_zero(value_, 1);
}

Real::Real(long value, int precision_bits) : Real(precision_bits) {
  mpfr_set_si(value_, value, MPFR_RNDN);
}

Real::Real(double value, int precision_bits) : Real(precision_bits) {
  mpfr_set_d(value_, value, MPFR_RNDN);
}

Real::Real(const Rational& value, int precision_bits) : Real(precision_bits) {
  mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
}

Real::Real(const Integer& value, int precision_bits) : Real(precision_bits) {
  mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const Real& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_swap(value_, other.value_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(value_)) return "nan";
  if (mpfr_inf_p(value_)) return sign() > 0 ? "inf" : "-inf";
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Re", std::max(digits - 1, 0), value_);
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

Real& Real::operator+=(const Real& rhs) {
  mpfr_prec_round(value_, wider(*this, rhs), MPFR_RNDN);
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& rhs) {
  mpfr_prec_round(value_, wider(*this, rhs), MPFR_RNDN);
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& rhs) {
  mpfr_prec_round(value_, wider(*this, rhs), MPFR_RNDN);
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& rhs) {
  mpfr_prec_round(value_, wider(*this, rhs), MPFR_RNDN);
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

Real operator*(Real lhs, const Rational& rhs) {
  mpfr_mul_q(lhs.value_, lhs.value_, rhs.get_mpq_t(), MPFR_RNDN);
  return lhs;
}

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.value_, r.value_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

Real Real::e(int precision_bits) {
  Real one(1L, precision_bits);
  return exp(one);
}

Real abs(Real x) {
  mpfr_abs(x.get(), x.get(), MPFR_RNDN);
  return x;
}

Real exp(const Real& x) {
  Real r(x.precision());
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real log(const Real& x) {
  Real r(x.precision());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real sqrt(const Real& x) {
  Real r(x.precision());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& base, const Real& exponent) {
  Real r(std::max(base.precision(), exponent.precision()));
  mpfr_pow(r.get(), base.get(), exponent.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& base, long exponent) {
  Real r(base.precision());
  mpfr_pow_si(r.get(), base.get(), exponent, MPFR_RNDN);
  return r;
}

Real pow(const Real& base, const Rational& exponent) {
  if (exponent.get_den() == 1 && exponent.get_num().fits_slong_p()) {
    return pow(base, exponent.get_num().get_si());
  }
  return pow(base, Real(exponent, base.precision()));
}

Real factorial_real(unsigned long n, int precision_bits) {
  Real r(precision_bits);
  mpfr_fac_ui(r.get(), n, MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return (a < b) ? b : a; }
Real min(const Real& a, const Real& b) { return (b < a) ? b : a; }

Real ldexp_one(long e, int precision_bits) {
  Real r(1L, precision_bits);
  mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
  return r;
}

}  // namespace mildkit
