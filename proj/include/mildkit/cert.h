#ifndef MILDKIT_CERT_H_
#define MILDKIT_CERT_H_

#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "mildkit/exp_poly.h"

namespace mildkit {

inline constexpr int kCertPrecisionBits = 256;

// A nonnegative real constant. Exact constants have the form q * e^r with
// rational q >= 0 and r; anything else falls back to a 256-bit value.
class Constant {
 public:
  Constant() : exact_(std::make_pair(Rational(0), Rational(0))) {}
  static Constant exact(const Rational& q, const Rational& e_exponent = 0);
  static Constant numeric(const Real& v);
  static Constant e() { return exact(1, 1); }

  bool is_exact() const { return exact_.has_value(); }
  // Precondition: is_exact().
  const Rational& rational_part() const { return exact_->first; }
  const Rational& e_exponent() const { return exact_->second; }

  Real value(int precision_bits = kCertPrecisionBits) const;
  bool is_zero() const;
  // "6", "e", "3/2*e^(1/2)"; decimal for numeric constants.
  std::string to_string() const;

  Constant pow(const Rational& p) const;

  friend Constant operator*(const Constant& a, const Constant& b);
  friend Constant operator/(const Constant& a, const Constant& b);
  friend Constant operator+(const Constant& a, const Constant& b);
  friend bool operator<(const Constant& a, const Constant& b);
  friend bool operator==(const Constant& a, const Constant& b);

 private:
  std::optional<std::pair<Rational, Rational>> exact_;
  Real numeric_{kCertPrecisionBits};
};

Constant max(const Constant& a, const Constant& b);

enum class CertKind { kMild, kWeaklyMild };
std::string to_string(CertKind kind);

// Claimed bound |f^(nu)| <= B A^|nu| (|nu|!)^(C+1), divided by x^nu for
// weakly mild certificates. `order0` overrides the bound at nu = 0; the
// composition rule only controls derivatives of order >= 1.
struct MildCert {
  Constant A;
  Constant B;
  Rational C;
  CertKind kind = CertKind::kMild;
  std::optional<Constant> order0;

  Real bound(int order, int precision_bits = kCertPrecisionBits) const;
  // max(B, order0): a B that is valid at every order.
  Constant effective_B() const;
};

MildCert make_cert(Constant A, Constant B, const Rational& C, CertKind kind = CertKind::kMild);
nlohmann::json to_json(const MildCert& cert);

// (6 alpha, e, 1/alpha) for alpha >= 1; (3 (2/alpha)^(1/alpha), e, 1/alpha) below 1.
MildCert p_alpha_cert(const Alpha& alpha);

// Composition f∘g. For C = 0:
//   A = A_g (1 + A_f B_g),  B = A_f B_f B_g / (1 + A_f B_g).
// For C > 0 the C = 0 rule is applied to the (C+1)-th roots of the four
// constants and the resulting A, B are raised back to the power C+1.
MildCert compose_certs(const MildCert& f, const MildCert& g);

// Leibniz: sum_k binom(n,k) A1^k A2^(n-k) (k!(n-k)!)^(C+1) <= (A1+A2)^n (n!)^(C+1)
// since binom(n,k) k!(n-k)! = n! and (k!(n-k)!)^C <= (n!)^C.
MildCert product_certs(const MildCert& a, const MildCert& b);

// f weakly (A,B,0)-mild with f' weakly (A,B,0)-mild; alpha >= 1.
// Result: (((alpha+1)/alpha)^((alpha+1)/alpha) 2 alpha (A+1), e B, 1 + 1/alpha).
MildCert weak_compose_cert(const Constant& A, const Constant& B, const Alpha& alpha);

// M for b(x) = x^mu on the open unit cube:
//   max over I with mu_I != 0 of (sup|db/dx_I| / (|mu_I| e^|mu'|))^(1/2),
// mu' = mu - e_I. Requires mu_I >= 1 wherever mu_I != 0, and mu >= 0.
Constant compute_M(std::span<const Rational> mu);

// (2 alpha (2 m N + 1), e^|mu| M^2, 1/alpha) with N = max |mu_i|; alpha >= 1.
MildCert abm_compose_cert(std::span<const Rational> mu, std::size_t m, const Alpha& alpha,
                          const Constant& M);

}  // namespace mildkit

#endif  // MILDKIT_CERT_H_
