#ifndef MILDKIT_EXP_POLY_H_
#define MILDKIT_EXP_POLY_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mildkit/real.h"

namespace mildkit {

// The exponent parameter alpha of P_alpha(x) = exp(1 - x^(-alpha)).
// Restricted to positive rationals so every exponent stays in Q + Q*alpha.
class Alpha {
 public:
  explicit Alpha(Rational value);
  const Rational& value() const { return value_; }
  friend bool operator==(const Alpha&, const Alpha&) = default;

 private:
  Rational value_;
};

// The exponent a + b*alpha of one variable. Equality is on the pair; alpha
// is treated as transcendental for canonical form.
struct AlphaExponent {
  Rational a;
  Rational b;

  Rational value(const Alpha& alpha) const { return a + b * alpha.value(); }
  friend bool operator==(const AlphaExponent&, const AlphaExponent&) = default;
  friend std::strong_ordering operator<=>(const AlphaExponent& x, const AlphaExponent& y);
};

// coeff * e^epow * prod_i x_i^(a_i + b_i alpha) * exp(s_i (1 - x_i^(-alpha)))
struct ExpTerm {
  Rational coeff;
  long epow = 0;
  std::vector<AlphaExponent> pows;
  std::vector<Rational> weights;

  // The canonical sort key excludes the coefficient.
  friend std::strong_ordering compare_key(const ExpTerm& x, const ExpTerm& y);
  friend bool operator==(const ExpTerm&, const ExpTerm&) = default;
};

// A value together with an absolute error bound. The bound is first-order:
// it charges each summand (|log-magnitude| + 16) ulps at precision_bits.
struct HPReal {
  Real value;
  Real abs_error;
  int precision_bits = kDefaultPrecisionBits;

  HPReal() : value(kDefaultPrecisionBits), abs_error(kDefaultPrecisionBits) {}
  HPReal(Real v, Real err, int bits)
      : value(std::move(v)), abs_error(std::move(err)), precision_bits(bits) {}

  // Upper bound on |true value|.
  Real magnitude_upper() const { return abs(value) + abs_error; }
  // The advertised relative budget 2^(8 - precision_bits).
  Real relative_budget() const { return ldexp_one(8 - precision_bits, precision_bits); }
};

class ExpPoly {
 public:
  ExpPoly(std::size_t arity, Alpha alpha);
  ExpPoly(std::size_t arity, Alpha alpha, std::vector<ExpTerm> terms);

  std::size_t arity() const { return arity_; }
  const Alpha& alpha() const { return alpha_; }
  const std::vector<ExpTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend bool operator==(const ExpPoly&, const ExpPoly&) = default;

  ExpPoly& operator+=(const ExpPoly& rhs);
  friend ExpPoly operator+(ExpPoly lhs, const ExpPoly& rhs) { return lhs += rhs; }
  friend ExpPoly operator-(ExpPoly lhs, const ExpPoly& rhs);
  friend ExpPoly operator*(const ExpPoly& lhs, const ExpPoly& rhs);
  friend ExpPoly operator*(ExpPoly lhs, const Rational& c);

 private:
  void canonicalize();
  void check_compatible(const ExpPoly& other) const;

  std::size_t arity_;
  Alpha alpha_;
  std::vector<ExpTerm> terms_;
};

enum class BasicKind { kPAlpha, kUAlpha, kMonomial, kExpOfLinear, kConstant };

// Builds one of the named basic functions. `var` selects the variable for
// P_alpha and u_alpha; `mu` is the exponent/weight vector for monomial and
// exp_of_linear; `c` is the value of a constant.
ExpPoly construct(BasicKind kind, std::size_t m, const Rational& alpha,
                  std::span<const Rational> mu = {}, const Rational& c = 0,
                  std::size_t var = 0);

ExpPoly differentiate(const ExpPoly& p, std::size_t var);
ExpPoly differentiate(const ExpPoly& p, std::span<const int> nu);

ExpPoly add(const ExpPoly& p, const ExpPoly& q);
ExpPoly mul(const ExpPoly& p, const ExpPoly& q);
ExpPoly scale(const ExpPoly& p, const Rational& c);

// Precomputed powers and exponentials at one point; reused across many
// ExpPoly evaluations at that point.
class PointContext {
 public:
  PointContext(const Alpha& alpha, std::span<const Real> point, int precision_bits);

  HPReal evaluate(const ExpPoly& p);
  int precision_bits() const { return precision_bits_; }

 private:
  struct PowerEntry {
    AlphaExponent key;
    Real value;
    double log_magnitude;
  };
  struct WeightEntry {
    Rational key;
    Real value;
    double log_magnitude;
  };
  const PowerEntry& power(std::size_t var, const AlphaExponent& e);
  const WeightEntry& weight(std::size_t var, const Rational& s);

  Alpha alpha_;
  int precision_bits_;
  std::vector<Real> x_;
  std::vector<Real> x_alpha_;      // x^alpha
  std::vector<Real> one_minus_;    // 1 - x^(-alpha)
  std::vector<double> log_x_;
  std::vector<std::vector<PowerEntry>> powers_;
  std::vector<std::vector<WeightEntry>> weights_;
  Real e_;
};

HPReal evaluate(const ExpPoly& p, std::span<const Rational> point,
                int precision_bits = kDefaultPrecisionBits);
HPReal evaluate(const ExpPoly& p, std::span<const Real> point,
                int precision_bits = kDefaultPrecisionBits);

nlohmann::json to_json(const ExpPoly& p);
ExpPoly exp_poly_from_json(const nlohmann::json& j);
std::string to_display_string(const ExpPoly& p);

}  // namespace mildkit

#endif  // MILDKIT_EXP_POLY_H_
