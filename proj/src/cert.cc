#include "mildkit/cert.h"

#include <algorithm>
#include <stdexcept>

namespace mildkit {
namespace {

Rational abs_rational(const Rational& q) { return sgn(q) < 0 ? Rational(-q) : q; }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational canonical(Rational q) {
  q.canonicalize();
  return q;
}

}  // namespace

Constant Constant::exact(const Rational& q, const Rational& e_exponent) {
  if (sgn(q) < 0) throw std::invalid_argument("constants must be nonnegative");
  Constant c;
  c.exact_ = std::make_pair(canonical(q), sgn(q) == 0 ? Rational(0) : canonical(e_exponent));
  return c;
}

Constant Constant::numeric(const Real& v) {
  if (v.sign() < 0) throw std::invalid_argument("constants must be nonnegative");
  Constant c;
  c.exact_.reset();
  c.numeric_ = Real(kCertPrecisionBits);
  mpfr_set(c.numeric_.get(), v.get(), MPFR_RNDU);
  return c;
}

Real Constant::value(int precision_bits) const {
  if (!exact_) {
    Real r(precision_bits);
    mpfr_set(r.get(), numeric_.get(), MPFR_RNDN);
    return r;
  }
  Real r(exact_->first, precision_bits);
  if (sgn(exact_->second) != 0) {
    r *= exp(Real(exact_->second, precision_bits));
  }
  return r;
}

bool Constant::is_zero() const {
  return exact_ ? sgn(exact_->first) == 0 : numeric_.is_zero();
}

std::string Constant::to_string() const {
  if (!exact_) return numeric_.to_string(30);
  const auto& [q, r] = *exact_;
  if (sgn(r) == 0) return q.get_str();
  std::string e_part = (r == 1) ? "e" : "e^(" + r.get_str() + ")";
  if (q == 1) return e_part;
  return q.get_str() + "*" + e_part;
}

Constant Constant::pow(const Rational& p) const {
  if (exact_) {
    const auto& [q, r] = *exact_;
    if (is_integer(p) && p.get_num().fits_slong_p()) {
      long k = p.get_num().get_si();
      return exact(rational_pow(q, k), r * p);
    }
    if (q == 1) return exact(1, r * p);
  }
  return numeric(mildkit::pow(value(), p));
}

Constant operator*(const Constant& a, const Constant& b) {
  if (a.exact_ && b.exact_) {
    return Constant::exact(a.exact_->first * b.exact_->first, a.exact_->second + b.exact_->second);
  }
  return Constant::numeric(a.value() * b.value());
}

Constant operator/(const Constant& a, const Constant& b) {
  if (b.is_zero()) throw std::domain_error("division by a zero constant");
  if (a.exact_ && b.exact_) {
    return Constant::exact(a.exact_->first / b.exact_->first, a.exact_->second - b.exact_->second);
  }
  return Constant::numeric(a.value() / b.value());
}

Constant operator+(const Constant& a, const Constant& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.exact_ && b.exact_ && a.exact_->second == b.exact_->second) {
    return Constant::exact(a.exact_->first + b.exact_->first, a.exact_->second);
  }
  return Constant::numeric(a.value() + b.value());
}

bool operator<(const Constant& a, const Constant& b) {
  if (a.exact_ && b.exact_ && a.exact_->second == b.exact_->second) {
    return a.exact_->first < b.exact_->first;
  }
  return a.value() < b.value();
}

bool operator==(const Constant& a, const Constant& b) {
  if (a.exact_ && b.exact_) return a.exact_ == b.exact_ || (a.is_zero() && b.is_zero());
  return a.value() == b.value();
}

Constant max(const Constant& a, const Constant& b) { return (a < b) ? b : a; }

std::string to_string(CertKind kind) {
  return kind == CertKind::kMild ? "mild" : "weakly_mild";
}

Real MildCert::bound(int order, int precision_bits) const {
  if (order == 0) return (order0 ? *order0 : B).value(precision_bits);
  Real r = B.value(precision_bits);
  r *= pow(A.value(precision_bits), static_cast<long>(order));
  Rational exponent = C + 1;
  r *= pow(factorial_real(static_cast<unsigned long>(order), precision_bits), exponent);
  return r;
}

Constant MildCert::effective_B() const { return order0 ? max(B, *order0) : B; }

MildCert make_cert(Constant A, Constant B, const Rational& C, CertKind kind) {
  if (B.is_zero()) throw std::invalid_argument("certificate B must be positive");
  if (sgn(C) < 0) throw std::invalid_argument("certificate C must be nonnegative");
  MildCert cert;
  cert.A = std::move(A);
  cert.B = std::move(B);
  cert.C = canonical(C);
  cert.kind = kind;
  return cert;
}

nlohmann::json to_json(const MildCert& cert) {
  nlohmann::json j = {{"A", cert.A.value().to_string(30)},
                      {"B", cert.B.value().to_string(30)},
                      {"C", to_string(cert.C)},
                      {"kind", to_string(cert.kind)},
                      {"A_exact", cert.A.is_exact() ? nlohmann::json(cert.A.to_string()) : nlohmann::json(nullptr)},
                      {"B_exact", cert.B.is_exact() ? nlohmann::json(cert.B.to_string()) : nlohmann::json(nullptr)},
                      {"precision_bits", kCertPrecisionBits}};
  if (cert.order0) j["order0"] = cert.order0->value().to_string(30);
  return j;
}

MildCert p_alpha_cert(const Alpha& alpha) {
  const Rational& a = alpha.value();
  Rational inv = canonical(Rational(1) / a);
  Constant A = (a >= 1) ? Constant::exact(6 * a)
                        : Constant::exact(3) * Constant::exact(2 * inv).pow(inv);
  return make_cert(A, Constant::e(), inv);
}

MildCert compose_certs(const MildCert& f, const MildCert& g) {
  if (f.kind != CertKind::kMild || g.kind != CertKind::kMild) {
    throw std::invalid_argument("compose_certs takes mild certificates; use weak_compose_cert");
  }
  if (f.A.is_zero()) {
    throw std::invalid_argument("outer certificate has A = 0 (constant function); nothing to compose");
  }
  const Rational C = std::max(f.C, g.C);
  const Rational root = canonical(Rational(1) / (C + 1));
  // g's value bound enters the formula, so its order-0 override counts.
  const Constant Af = f.A.pow(root), Bf = f.B.pow(root);
  const Constant Ag = g.A.pow(root), Bg = g.effective_B().pow(root);
  const Constant one = Constant::exact(1);
  const Constant denom = one + Af * Bg;
  Constant A = Ag * denom;
  Constant B = Af * Bf * Bg / denom;
  if (sgn(C) != 0) {
    A = A.pow(C + 1);
    B = B.pow(C + 1);
  }
  MildCert out = make_cert(A, B, C);
  out.order0 = f.effective_B();
  return out;
}

MildCert product_certs(const MildCert& a, const MildCert& b) {
  if (a.kind != CertKind::kMild || b.kind != CertKind::kMild) {
    throw std::invalid_argument("product_certs takes mild certificates");
  }
  return make_cert(a.A + b.A, a.effective_B() * b.effective_B(), std::max(a.C, b.C));
}

MildCert weak_compose_cert(const Constant& A, const Constant& B, const Alpha& alpha) {
  const Rational& a = alpha.value();
  if (a < 1) {
    throw std::invalid_argument(
        "weak_compose_cert: constants are only available for alpha >= 1 (unsupported regime)");
  }
  Rational ratio = canonical((a + 1) / a);
  Constant lead = Constant::exact(ratio).pow(ratio);
  Constant A_out = lead * Constant::exact(2 * a) * (A + Constant::exact(1));
  Constant B_out = Constant::e() * B;
  return make_cert(A_out, B_out, canonical(1 + Rational(1) / a));
}

Constant compute_M(std::span<const Rational> mu) {
  const std::size_t m = mu.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (sgn(mu[i]) < 0) {
      throw std::invalid_argument("compute_M: exponent mu[" + std::to_string(i) +
                                  "] is negative; b is unbounded on the unit cube");
    }
    if (sgn(mu[i]) != 0 && mu[i] < 1) {
      throw std::invalid_argument("compute_M: d b / d x_" + std::to_string(i) +
                                  " is unbounded near 0 (mu[" + std::to_string(i) + "] < 1)");
    }
  }
  std::optional<Constant> best;
  for (std::size_t I = 0; I < m; ++I) {
    if (sgn(mu[I]) == 0) continue;
    // x^(mu - e_I) has nonnegative exponents: its sup on the cube is 1,
    // so sup |db/dx_I| = |mu_I|.
    const Rational sup_partial = abs_rational(mu[I]);
    Rational mu_prime_norm = 0;
    for (std::size_t j = 0; j < m; ++j) mu_prime_norm += abs_rational(j == I ? Rational(mu[j] - 1) : mu[j]);
    Constant ratio = Constant::exact(sup_partial / abs_rational(mu[I]), -mu_prime_norm);
    Constant MI = ratio.pow(Rational(1, 2));
    best = best ? max(*best, MI) : MI;
  }
  // b is constant: any M >= 1 works; take 1.
  return best.value_or(Constant::exact(1));
}

MildCert abm_compose_cert(std::span<const Rational> mu, std::size_t m, const Alpha& alpha,
                          const Constant& M) {
  if (mu.size() != m) throw std::invalid_argument("abm_compose_cert: mu must have length m");
  if (alpha.value() < 1) {
    throw std::invalid_argument("abm_compose_cert: the stated constant requires alpha >= 1");
  }
  compute_M(mu);  // precondition: bounded first-order partials
  Rational N = 0, norm = 0;
  for (const Rational& x : mu) {
    N = std::max(N, abs_rational(x));
    norm += abs_rational(x);
  }
  const Rational& a = alpha.value();
  Constant A = Constant::exact(2 * a * (2 * Rational(static_cast<long>(m)) * N + 1));
  Constant B = Constant::exact(1, norm) * M.pow(2);
  return make_cert(A, B, canonical(Rational(1) / a));
}

}  // namespace mildkit
