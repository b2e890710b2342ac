#include "mildkit/lemmas.h"

#include <stdexcept>

#include "mildkit/faa_di_bruno.h"

namespace mildkit {

UmildReport check_umild(const Alpha& alpha, int k_max) {
  if (k_max < 1) throw std::invalid_argument("check_umild: k_max must be at least 1");
  const Rational& a = alpha.value();
  UmildReport report{a, {}, true};
  ExpPoly u = construct(BasicKind::kUAlpha, 1, a);
  ExpPoly derivative = u;
  Rational rising = 1;
  for (int k = 1; k <= k_max; ++k) {
    derivative = differentiate(derivative, std::size_t{0});
    rising *= a + (k - 1);
    Rational bound = Rational(factorial(static_cast<unsigned long>(k)));
    if (a >= 1) bound *= rational_pow(a, k);

    // x^(alpha+k) u^(k)(x): multiply by the monomial x^(k + alpha).
    ExpTerm weight;
    weight.coeff = 1;
    weight.pows = {AlphaExponent{k, 1}};
    weight.weights = {Rational(0)};
    ExpPoly weighted = derivative * ExpPoly(1, alpha, {weight});
    bool constant = weighted.terms().size() == 1 && weighted.terms()[0].pows[0] == AlphaExponent{0, 0} &&
                    sgn(weighted.terms()[0].weights[0]) == 0 &&
                    abs(weighted.terms()[0].coeff) == rising;

    UmildRow row{k, rising, bound, rising <= bound, rising == bound, constant};
    report.pass = report.pass && row.holds && row.constant_in_x;
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExpmildReport check_expmild(const Rational& r, const Rational& s, const Alpha& alpha,
                            int precision_bits) {
  if (sgn(r) <= 0 || sgn(s) <= 0) throw std::invalid_argument("check_expmild: r and s must be positive");
  const int bits = precision_bits;
  const Rational& a = alpha.value();
  const Real r_real(r, bits), s_real(s, bits), a_real(a, bits);

  ExpmildReport rep{r, s, a, Real(bits), Real(bits), Real(bits), Real(bits), Real(bits), false};
  // (r / (e s alpha))^(r/alpha) at x = (s alpha / r)^(1/alpha)
  Rational ratio = r / (s * a);
  rep.closed_form = pow(Real(ratio, bits) / Real::e(bits), Rational(r / a));
  rep.closed_argmax = pow(Real(Rational(s * a / r), bits), Rational(Rational(1) / a));

  // log of the objective; unimodal on (0, inf)
  auto objective = [&](const Real& x) { return -(r_real * log(x)) - s_real * pow(x, -a_real); };

  Real lo = rep.closed_argmax * Rational(1, 4);
  Real hi = rep.closed_argmax * Rational(4);
  const Real inv_phi = (sqrt(Real(5L, bits)) - Real(1L, bits)) * Rational(1, 2);
  Real x1 = hi - inv_phi * (hi - lo);
  Real x2 = lo + inv_phi * (hi - lo);
  Real f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 220; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }
  rep.numeric_argmax = (lo + hi) * Rational(1, 2);
  rep.numeric_max = exp(objective(rep.numeric_argmax));
  rep.relative_difference = abs(rep.numeric_max - rep.closed_form) / rep.closed_form;
  rep.pass = rep.relative_difference < Real(kExpmildTolerance, 64);
  return rep;
}

GfReport gf_check(const Rational& A_f, const Rational& B_f, const Rational& A_g,
                  const Rational& B_g, int n_max) {
  for (const Rational* p : {&A_f, &B_f, &A_g, &B_g}) {
    if (sgn(*p) <= 0) throw std::invalid_argument("gf_check: parameters must be positive");
  }
  GfReport report{A_f, B_f, A_g, B_g, {}, true};
  auto psi = [&](const MultiIndex& lambda) {
    int k = lambda.order();
    return Rational(B_f * rational_pow(A_f, k) * Rational(factorial(static_cast<unsigned long>(k))));
  };
  auto phi = [&](std::size_t, const MultiIndex& l) {
    int k = l.order();
    return Rational(B_g * rational_pow(A_g, k) * Rational(factorial(static_cast<unsigned long>(k))));
  };
  const Rational lead = A_f * B_f * B_g / (1 + A_f * B_g);
  const Rational growth = A_g * (1 + A_f * B_g);
  for (int n = 1; n <= n_max; ++n) {
    Rational chain = compose_derivative<Rational>(psi, phi, MultiIndex({n}), 1, Rational(0));
    chain.canonicalize();
    Rational closed = lead * rational_pow(growth, n) * Rational(factorial(static_cast<unsigned long>(n)));
    closed.canonicalize();
    GfRow row{n, chain, closed, chain == closed};
    report.pass = report.pass && row.equal;
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json to_json(const UmildReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const UmildRow& row : r.rows) {
    rows.push_back({{"k", row.k},
                    {"rising_factorial", to_string(row.rising)},
                    {"bound", to_string(row.bound)},
                    {"holds", row.holds},
                    {"tight", row.tight},
                    {"constant_in_x", row.constant_in_x}});
  }
  return {{"alpha", to_string(r.alpha)}, {"rows", std::move(rows)}, {"pass", r.pass}};
}

nlohmann::json to_json(const ExpmildReport& r) {
  return {{"r", to_string(r.r)},
          {"s", to_string(r.s)},
          {"alpha", to_string(r.alpha)},
          {"closed_form", r.closed_form.to_string(25)},
          {"closed_argmax", r.closed_argmax.to_string(25)},
          {"numeric_max", r.numeric_max.to_string(25)},
          {"numeric_argmax", r.numeric_argmax.to_string(25)},
          {"relative_difference", r.relative_difference.to_string(5)},
          {"pass", r.pass}};
}

nlohmann::json to_json(const GfReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const GfRow& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"chain_rule", to_string(row.via_chain_rule)},
                    {"closed_form", to_string(row.closed_form)},
                    {"equal", row.equal}});
  }
  return {{"A_f", to_string(r.A_f)}, {"B_f", to_string(r.B_f)}, {"A_g", to_string(r.A_g)},
          {"B_g", to_string(r.B_g)}, {"rows", std::move(rows)}, {"pass", r.pass}};
}

}  // namespace mildkit
