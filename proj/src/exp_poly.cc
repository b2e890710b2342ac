#include "mildkit/exp_poly.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mildkit {
namespace {

std::strong_ordering compare(const Rational& x, const Rational& y) {
  int c = cmp(x, y);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

double rational_to_double(const Rational& q) { return q.get_d(); }

}  // namespace

Alpha::Alpha(Rational value) : value_(std::move(value)) {
  value_.canonicalize();
  if (sgn(value_) <= 0) throw std::invalid_argument("alpha must be positive");
}

std::strong_ordering operator<=>(const AlphaExponent& x, const AlphaExponent& y) {
  if (auto c = compare(x.a, y.a); c != 0) return c;
  return compare(x.b, y.b);
}

// Lexicographic on the flattened (a, b) list, then weights, then epow.
std::strong_ordering compare_key(const ExpTerm& x, const ExpTerm& y) {
  for (std::size_t i = 0; i < x.pows.size(); ++i) {
    if (auto c = x.pows[i] <=> y.pows[i]; c != 0) return c;
  }
  for (std::size_t i = 0; i < x.weights.size(); ++i) {
    if (auto c = compare(x.weights[i], y.weights[i]); c != 0) return c;
  }
  return x.epow <=> y.epow;
}

ExpPoly::ExpPoly(std::size_t arity, Alpha alpha) : arity_(arity), alpha_(std::move(alpha)) {
  if (arity_ == 0) throw std::invalid_argument("arity must be at least 1");
}

ExpPoly::ExpPoly(std::size_t arity, Alpha alpha, std::vector<ExpTerm> terms)
    : ExpPoly(arity, std::move(alpha)) {
  for (const ExpTerm& t : terms) {
    if (t.pows.size() != arity_ || t.weights.size() != arity_) {
      throw std::invalid_argument("term arity does not match polynomial arity");
    }
  }
  terms_ = std::move(terms);
  canonicalize();
}

void ExpPoly::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const ExpTerm& x, const ExpTerm& y) { return compare_key(x, y) < 0; });
  std::vector<ExpTerm> merged;
  merged.reserve(terms_.size());
  for (ExpTerm& t : terms_) {
    if (!merged.empty() && compare_key(merged.back(), t) == 0) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const ExpTerm& t) { return sgn(t.coeff) == 0; });
  for (ExpTerm& t : merged) t.coeff.canonicalize();
  terms_ = std::move(merged);
}

void ExpPoly::check_compatible(const ExpPoly& other) const {
  if (arity_ != other.arity_) throw std::invalid_argument("ExpPoly arity mismatch");
  if (!(alpha_ == other.alpha_)) throw std::invalid_argument("ExpPoly alpha mismatch");
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& rhs) {
  check_compatible(rhs);
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  canonicalize();
  return *this;
}

ExpPoly operator-(ExpPoly lhs, const ExpPoly& rhs) {
  return lhs += rhs * Rational(-1);
}

ExpPoly operator*(const ExpPoly& lhs, const ExpPoly& rhs) {
  lhs.check_compatible(rhs);
  std::vector<ExpTerm> out;
  out.reserve(lhs.terms_.size() * rhs.terms_.size());
  for (const ExpTerm& x : lhs.terms_) {
    for (const ExpTerm& y : rhs.terms_) {
      ExpTerm t;
      t.coeff = x.coeff * y.coeff;
      t.epow = x.epow + y.epow;
      t.pows.resize(lhs.arity_);
      t.weights.resize(lhs.arity_);
      for (std::size_t i = 0; i < lhs.arity_; ++i) {
        t.pows[i] = {x.pows[i].a + y.pows[i].a, x.pows[i].b + y.pows[i].b};
        t.weights[i] = x.weights[i] + y.weights[i];
      }
      out.push_back(std::move(t));
    }
  }
  return ExpPoly(lhs.arity_, lhs.alpha_, std::move(out));
}

ExpPoly operator*(ExpPoly lhs, const Rational& c) {
  for (ExpTerm& t : lhs.terms_) t.coeff *= c;
  lhs.canonicalize();
  return lhs;
}

ExpPoly add(const ExpPoly& p, const ExpPoly& q) { return p + q; }
ExpPoly mul(const ExpPoly& p, const ExpPoly& q) { return p * q; }
ExpPoly scale(const ExpPoly& p, const Rational& c) { return p * c; }

namespace {

ExpTerm unit_term(std::size_t m) {
  ExpTerm t;
  t.coeff = 1;
  t.pows.assign(m, AlphaExponent{0, 0});
  t.weights.assign(m, Rational(0));
  return t;
}

}  // namespace

ExpPoly construct(BasicKind kind, std::size_t m, const Rational& alpha,
                  std::span<const Rational> mu, const Rational& c, std::size_t var) {
  if (m == 0) throw std::invalid_argument("arity must be at least 1");
  Alpha a(alpha);
  if (var >= m) throw std::out_of_range("variable index out of range");
  auto need_mu = [&] {
    if (mu.size() != m) throw std::invalid_argument("exponent vector length must equal arity");
  };
  std::vector<ExpTerm> terms;
  switch (kind) {
    case BasicKind::kPAlpha: {
      ExpTerm t = unit_term(m);
      t.weights[var] = 1;
      terms.push_back(std::move(t));
      break;
    }
    case BasicKind::kUAlpha: {
      terms.push_back(unit_term(m));
      ExpTerm t = unit_term(m);
      t.coeff = -1;
      t.pows[var] = {0, -1};
      terms.push_back(std::move(t));
      break;
    }
    case BasicKind::kMonomial: {
      need_mu();
      ExpTerm t = unit_term(m);
      for (std::size_t i = 0; i < m; ++i) t.pows[i] = {mu[i], 0};
      terms.push_back(std::move(t));
      break;
    }
    case BasicKind::kExpOfLinear: {
      need_mu();
      ExpTerm t = unit_term(m);
      for (std::size_t i = 0; i < m; ++i) t.weights[i] = mu[i];
      terms.push_back(std::move(t));
      break;
    }
    case BasicKind::kConstant: {
      ExpTerm t = unit_term(m);
      t.coeff = c;
      terms.push_back(std::move(t));
      break;
    }
  }
  return ExpPoly(m, a, std::move(terms));
}

// d/dx [x^(a+b alpha) e^(s(1-x^-alpha))]
//   = (a + b alpha) x^(a-1+b alpha) E + s alpha x^(a-1+(b-1)alpha) E
ExpPoly differentiate(const ExpPoly& p, std::size_t var) {
  if (var >= p.arity()) throw std::out_of_range("variable index out of range");
  const Rational& alpha = p.alpha().value();
  std::vector<ExpTerm> out;
  out.reserve(2 * p.terms().size());
  for (const ExpTerm& t : p.terms()) {
    const AlphaExponent& e = t.pows[var];
    Rational power_coeff = e.a + e.b * alpha;
    if (sgn(power_coeff) != 0) {
      ExpTerm d = t;
      d.coeff = t.coeff * power_coeff;
      d.pows[var] = {e.a - 1, e.b};
      out.push_back(std::move(d));
    }
    const Rational& s = t.weights[var];
    if (sgn(s) != 0) {
      ExpTerm d = t;
      d.coeff = t.coeff * s * alpha;
      d.pows[var] = {e.a - 1, e.b - 1};
      out.push_back(std::move(d));
    }
  }
  return ExpPoly(p.arity(), p.alpha(), std::move(out));
}

ExpPoly differentiate(const ExpPoly& p, std::span<const int> nu) {
  if (nu.size() != p.arity()) throw std::invalid_argument("multi-index length must equal arity");
  ExpPoly out = p;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    for (int k = 0; k < nu[i]; ++k) out = differentiate(out, i);
  }
  return out;
}

PointContext::PointContext(const Alpha& alpha, std::span<const Real> point, int precision_bits)
    : alpha_(alpha), precision_bits_(precision_bits), e_(Real::e(precision_bits)) {
  Real alpha_real(alpha.value(), precision_bits);
  Real one(1L, precision_bits);
  for (const Real& xi : point) {
    if (xi.sign() <= 0) throw std::domain_error("evaluation point must be positive");
    if (xi > one) throw std::domain_error("evaluation point must lie in (0, 1]");
    Real x(precision_bits);
    mpfr_set(x.get(), xi.get(), MPFR_RNDN);
    Real xa = pow(x, alpha.value());
    one_minus_.push_back(one - one / xa);
    log_x_.push_back(log(x).to_double());
    x_alpha_.push_back(std::move(xa));
    x_.push_back(std::move(x));
  }
  powers_.resize(x_.size());
  weights_.resize(x_.size());
}

const PointContext::PowerEntry& PointContext::power(std::size_t var, const AlphaExponent& e) {
  auto& cache = powers_[var];
  auto it = std::lower_bound(cache.begin(), cache.end(), e,
                             [](const PowerEntry& p, const AlphaExponent& k) { return p.key < k; });
  if (it != cache.end() && it->key == e) return *it;
  Real pa = is_integer(e.a) ? pow(x_[var], e.a.get_num().get_si())
                            : pow(x_[var], Real(e.a, precision_bits_));
  Real pb = is_integer(e.b) ? pow(x_alpha_[var], e.b.get_num().get_si())
                            : pow(x_alpha_[var], Real(e.b, precision_bits_));
  double alpha_d = rational_to_double(alpha_.value());
  double mag = (std::abs(rational_to_double(e.a)) + std::abs(rational_to_double(e.b)) * alpha_d) *
               std::abs(log_x_[var]);
  return *cache.insert(it, PowerEntry{e, pa * pb, mag});
}

const PointContext::WeightEntry& PointContext::weight(std::size_t var, const Rational& s) {
  auto& cache = weights_[var];
  auto it = std::lower_bound(cache.begin(), cache.end(), s,
                             [](const WeightEntry& w, const Rational& k) { return w.key < k; });
  if (it != cache.end() && it->key == s) return *it;
  Real value = exp(one_minus_[var] * s);
  double x_minus_alpha = 1.0 - one_minus_[var].to_double();
  double alpha_d = rational_to_double(alpha_.value());
  double mag = std::abs(rational_to_double(s)) * x_minus_alpha * (1.0 + alpha_d * std::abs(log_x_[var]));
  if (!std::isfinite(mag)) mag = 1e300;
  return *cache.insert(it, WeightEntry{s, std::move(value), mag});
}

HPReal PointContext::evaluate(const ExpPoly& p) {
  if (p.arity() != x_.size()) throw std::invalid_argument("point dimension must equal arity");
  if (!(p.alpha() == alpha_)) throw std::invalid_argument("alpha mismatch in evaluation");
  Real sum(precision_bits_);
  Real err(precision_bits_);
  const Real ulp = ldexp_one(-precision_bits_, 64);
  for (const ExpTerm& t : p.terms()) {
    Real term(t.coeff, precision_bits_);
    double mag = 16.0;
    if (t.epow != 0) term *= pow(e_, t.epow);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (t.pows[i].a != 0 || t.pows[i].b != 0) {
        const PowerEntry& pe = power(i, t.pows[i]);
        term *= pe.value;
        mag += pe.log_magnitude + 2.0;
      }
      if (sgn(t.weights[i]) != 0) {
        const WeightEntry& we = weight(i, t.weights[i]);
        term *= we.value;
        mag += we.log_magnitude + 2.0;
      }
    }
    if (!term.is_finite()) {
      throw std::overflow_error("ExpPoly term is not finite at the evaluation point");
    }
    sum += term;
    err += abs(term) * Real(mag, 64) * ulp;
  }
  Real slack = abs(sum) * ulp;
  err += slack;
  return HPReal(std::move(sum), std::move(err), precision_bits_);
}

HPReal evaluate(const ExpPoly& p, std::span<const Real> point, int precision_bits) {
  if (precision_bits < 64) throw std::invalid_argument("precision_bits must be at least 64");
  if (point.size() != p.arity()) throw std::invalid_argument("point dimension must equal arity");
  PointContext ctx(p.alpha(), point, precision_bits);
  return ctx.evaluate(p);
}

HPReal evaluate(const ExpPoly& p, std::span<const Rational> point, int precision_bits) {
  std::vector<Real> reals;
  reals.reserve(point.size());
  for (const Rational& q : point) {
    if (sgn(q) <= 0) throw std::domain_error("evaluation point must be positive");
    reals.emplace_back(q, precision_bits);
  }
  return evaluate(p, std::span<const Real>(reals), precision_bits);
}

nlohmann::json to_json(const ExpPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const ExpTerm& t : p.terms()) {
    nlohmann::json pows = nlohmann::json::array();
    nlohmann::json weights = nlohmann::json::array();
    for (std::size_t i = 0; i < p.arity(); ++i) {
      pows.push_back({to_string(t.pows[i].a), to_string(t.pows[i].b)});
      weights.push_back(to_string(t.weights[i]));
    }
    terms.push_back({{"coeff", to_string(t.coeff)},
                     {"epow", t.epow},
                     {"pows", std::move(pows)},
                     {"weights", std::move(weights)}});
  }
  return {{"arity", p.arity()}, {"alpha", to_string(p.alpha().value())}, {"terms", std::move(terms)}};
}

ExpPoly exp_poly_from_json(const nlohmann::json& j) {
  std::size_t m = j.at("arity").get<std::size_t>();
  Alpha alpha(parse_rational(j.at("alpha").get<std::string>()));
  std::vector<ExpTerm> terms;
  for (const auto& jt : j.at("terms")) {
    ExpTerm t;
    t.coeff = parse_rational(jt.at("coeff").get<std::string>());
    t.epow = jt.at("epow").get<long>();
    for (const auto& jp : jt.at("pows")) {
      t.pows.push_back({parse_rational(jp.at(0).get<std::string>()),
                        parse_rational(jp.at(1).get<std::string>())});
    }
    for (const auto& jw : jt.at("weights")) t.weights.push_back(parse_rational(jw.get<std::string>()));
    terms.push_back(std::move(t));
  }
  return ExpPoly(m, alpha, std::move(terms));
}

std::string to_display_string(const ExpPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const ExpTerm& t : p.terms()) {
    if (!first) out << " + ";
    first = false;
    out << "(" << t.coeff.get_str() << ")";
    if (t.epow != 0) out << "*e^" << t.epow;
    for (std::size_t i = 0; i < p.arity(); ++i) {
      if (t.pows[i].a != 0 || t.pows[i].b != 0) {
        out << "*x" << i << "^(" << t.pows[i].a.get_str() << "+" << t.pows[i].b.get_str() << "a)";
      }
      if (sgn(t.weights[i]) != 0) out << "*E" << i << "^(" << t.weights[i].get_str() << ")";
    }
  }
  return out.str();
}

}  // namespace mildkit
