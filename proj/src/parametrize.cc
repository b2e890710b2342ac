#include "mildkit/parametrize.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mildkit {

namespace {

Rational q_abs(const Rational& q) { return sgn(q) < 0 ? Rational(-q) : q; }

ExpTerm unit_term(std::size_t m) {
  ExpTerm t;
  t.coeff = 1;
  t.pows.assign(m, AlphaExponent{0, 0});
  t.weights.assign(m, Rational(0));
  return t;
}

// eps^2 exp(-(1 - u^(-alpha))) = eps^2 / P_alpha(u)
ExpPoly hyperbola_partner(const Rational& epsilon, const Alpha& alpha) {
  ExpTerm t = unit_term(1);
  t.coeff = epsilon * epsilon;
  t.weights[0] = -1;
  return ExpPoly(1, alpha, {t});
}

HPReal value_at(const DerivativeOracle& oracle, const Real& t) {
  std::vector<Real> point{t};
  return oracle.value(MultiIndex::zero(oracle.arity()), point);
}

void require_epsilon(const Rational& epsilon) {
  if (sgn(epsilon) <= 0 || epsilon >= 1) {
    throw std::invalid_argument("epsilon must lie in (0, 1), got " + to_string(epsilon));
  }
}

}  // namespace

Real p_alpha_inverse(const Real& y, const Alpha& alpha) {
  if (y.sign() <= 0) return Real(0L, y.precision());
  const Real one(1L, y.precision());
  if (y > one) throw std::domain_error("p_alpha_inverse: argument exceeds 1");
  return pow(one - log(y), Rational(Rational(-1) / alpha.value()));
}

std::string to_string(ChartId id) {
  switch (id) {
    case ChartId::kMain: return "main";
    case ChartId::kSwapped: return "swapped";
    case ChartId::kPoint: return "point";
    case ChartId::kAbm: return "abm";
  }
  return "?";
}

std::vector<Chart> yomdin_charts(const Rational& epsilon, const Alpha& alpha, const MildCert& cert,
                                 int precision_bits) {
  require_epsilon(epsilon);
  const int bits = precision_bits;
  const Real delta = p_alpha_inverse(Real(epsilon, bits), alpha);
  std::vector<AxisAffine> affine{AxisAffine{Real(1L, bits) - delta, delta}};

  ExpPoly x_poly = construct(BasicKind::kPAlpha, 1, alpha.value());
  ExpPoly y_poly = hyperbola_partner(epsilon, alpha);
  auto x_oracle = std::make_shared<ExpPolyOracle>(x_poly, bits, affine);
  auto y_oracle = std::make_shared<ExpPolyOracle>(y_poly, bits, affine);

  Chart main{ChartId::kMain, epsilon, delta, {{"x", x_oracle, x_poly}, {"y", y_oracle, y_poly}}, cert};
  Chart swapped{ChartId::kSwapped, epsilon, delta, {{"x", y_oracle, y_poly}, {"y", x_oracle, x_poly}}, cert};
  ExpPoly eps_poly = construct(BasicKind::kConstant, 1, alpha.value(), {}, epsilon);
  auto eps_oracle = constant_oracle(1, epsilon, bits);
  Chart point{ChartId::kPoint, epsilon, delta, {{"x", eps_oracle, eps_poly}, {"y", eps_oracle, eps_poly}}, cert};
  return {std::move(main), std::move(swapped), std::move(point)};
}

FamilyParam yomdin_family_with_cert(const Alpha& alpha, std::vector<Rational> epsilons,
                                    const MildCert& cert, int precision_bits) {
  if (epsilons.empty()) throw std::invalid_argument("yomdin_family: no epsilon given");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  FamilyParam family;
  family.alpha = alpha;
  family.parameters = epsilons;
  family.uniform_cert = cert;
  for (const Rational& eps : epsilons) family.charts.push_back(yomdin_charts(eps, alpha, cert, precision_bits));
  return family;
}

MildCert fit_uniform_cert(const Alpha& alpha, const Rational& largest_epsilon, int n_fit,
                          UniformFit method, const GridSpec& grid, const Rational& safety,
                          int precision_bits) {
  if (n_fit < 1) throw std::invalid_argument("fit_uniform_cert: n_fit must be at least 1");
  if (safety < 1) throw std::invalid_argument("fit_uniform_cert: safety factor must be at least 1");
  const Rational C = Rational(1) / alpha.value();
  Real A(0L, kCertPrecisionBits), B(1L, kCertPrecisionBits);

  if (method == UniformFit::kLargestEpsilon) {
    // Placeholder certificate while fitting.
    std::vector<Chart> probe = yomdin_charts(largest_epsilon, alpha, p_alpha_cert(alpha), precision_bits);
    for (const ChartComponent& c : probe[0].components) {
      FitResult fit = fit_constants(*c.oracle, C, n_fit, grid);
      A = max(A, fit.A_fitted);
      B = max(B, fit.B_fitted);
    }
  } else {
    ExpPolyOracle x_env(construct(BasicKind::kPAlpha, 1, alpha.value()), precision_bits);
    FitResult fit = fit_constants(x_env, C, n_fit, grid);
    A = max(A, fit.A_fitted);
    B = max(B, fit.B_fitted);

    const Rational minus_one = -1, two = 2;
    ExpPoly inv_E = construct(BasicKind::kExpOfLinear, 1, alpha.value(), std::span(&minus_one, 1));
    const ExpPoly E2 = construct(BasicKind::kExpOfLinear, 1, alpha.value(), std::span(&two, 1));
    const std::vector<MultiIndex> nu0{MultiIndex::zero(1)};
    for (int n = 0; n <= n_fit; ++n) {
      if (n > 0) inv_E = differentiate(inv_E, std::size_t{0});
      ExpPolyOracle envelope(E2 * inv_E, precision_bits);
      Real sup = estimate_sups(envelope, nu0, false, grid)[0].sup;
      if (n == 0) {
        B = max(B, sup);
        continue;
      }
      Real fact = factorial_real(static_cast<unsigned long>(n), kCertPrecisionBits);
      Real ratio = sup / (B * pow(fact, Rational(C + 1)));
      A = max(A, pow(ratio, Rational(1, n)));
    }
  }
  return make_cert(Constant::numeric(A * safety), Constant::numeric(B * safety), C);
}

FamilyParam yomdin_family(const Alpha& alpha, std::vector<Rational> epsilons, int n_fit,
                          UniformFit method, const GridSpec& grid, const Rational& safety,
                          int precision_bits) {
  if (epsilons.empty()) throw std::invalid_argument("yomdin_family: no epsilon given");
  const Rational largest = *std::max_element(epsilons.begin(), epsilons.end());
  require_epsilon(largest);
  MildCert cert = fit_uniform_cert(alpha, largest, n_fit, method, grid, safety, precision_bits);
  return yomdin_family_with_cert(alpha, std::move(epsilons), cert, precision_bits);
}

std::vector<CoverageReport> verify_family(const FamilyParam& family, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("verify_family: need at least two samples");
  std::vector<CoverageReport> reports;
  for (std::size_t e = 0; e < family.parameters.size(); ++e) {
    const Rational& eps = family.parameters[e];
    const std::vector<Chart>& charts = family.charts[e];
    const Chart& main = charts.at(0);
    const int bits = main.components[0].oracle->precision_bits();
    CoverageReport rep;
    rep.epsilon = eps;
    rep.samples = samples + 1;
    rep.max_distance = Real(0L, bits);
    rep.tolerance = ldexp_one(48 - bits, bits);

    // x * y - eps^2 vanishes identically on the main chart; the swapped chart
    // reuses the same pair and the point chart is (eps, eps).
    {
      const ExpPoly& xp = *main.components[0].exact;
      const ExpPoly& yp = *main.components[1].exact;
      ExpPoly residual = xp * yp - construct(BasicKind::kConstant, 1, family.alpha.value(), {}, eps * eps);
      rep.on_curve_exact = residual.is_zero();
    }

    const Real eps_real(eps, bits), eps2(Rational(eps * eps), bits);
    const Real one(1L, bits), zero(0L, bits);
    const Real& delta = main.delta;
    const Real span = one - delta;

    // Geometric samples strictly inside (eps^2, 1) plus the point x = eps.
    std::vector<Real> xs;
    xs.reserve(samples + 1);
    const Real log_lo = log(eps2);
    for (std::size_t i = 0; i < samples; ++i) {
      Rational frac(static_cast<long>(i + 1), static_cast<long>(samples + 1));
      xs.push_back(exp(log_lo * Rational(1 - frac)));
    }
    xs.push_back(eps_real);

    for (const Chart& c : charts) rep.ranges.push_back(ChartRange{c.id, 0, Real(2L, bits), Real(-1L, bits)});

    bool tiles = true;
    for (const Real& x : xs) {
      const Real y = eps2 / x;
      std::size_t hits = 0;
      for (std::size_t ci = 0; ci < charts.size(); ++ci) {
        const Chart& chart = charts[ci];
        Real t(bits);
        bool hit = false;
        if (chart.id == ChartId::kPoint) {
          hit = (x == eps_real);
          t = Real(Rational(1, 2), bits);
        } else {
          // main: first coordinate P(u) = x; swapped: first coordinate eps^2/P(u) = x.
          const Real target = chart.id == ChartId::kMain ? x : y;
          t = (p_alpha_inverse(target, family.alpha) - delta) / span;
          hit = t > zero && t < one;
        }
        if (!hit) continue;
        ++hits;
        const Real cx = value_at(*chart.components[0].oracle, t).value;
        const Real cy = value_at(*chart.components[1].oracle, t).value;
        Real d = max(abs(cx - x), abs(cy - y));
        rep.max_distance = max(rep.max_distance, d);
        ChartRange& range = rep.ranges[ci];
        ++range.hits;
        range.t_min = min(range.t_min, t);
        range.t_max = max(range.t_max, t);
      }
      if (hits != 1) {
        tiles = false;
        if (rep.uncovered.size() < 8) {
          rep.uncovered.push_back(x.to_string(20) + " hit by " + std::to_string(hits) + " charts");
        }
      }
    }
    rep.tiles = tiles;
    rep.pass = rep.on_curve_exact && rep.tiles && rep.max_distance <= rep.tolerance;
    reports.push_back(std::move(rep));
  }
  return reports;
}

UniformReport uniform_verify(const FamilyParam& family, int n_max, const GridSpec& grid) {
  UniformReport out;
  for (std::size_t e = 0; e < family.parameters.size(); ++e) {
    std::set<const DerivativeOracle*> seen;
    for (const Chart& chart : family.charts[e]) {
      for (const ChartComponent& comp : chart.components) {
        if (!seen.insert(comp.oracle.get()).second) continue;
        BoundReport r = verify_cert(*comp.oracle, family.uniform_cert, n_max, grid);
        out.pass = out.pass && r.pass;
        out.entries.push_back(UniformEntry{family.parameters[e], chart.id, comp.name, std::move(r)});
      }
    }
  }
  return out;
}

OraclePtr naive_chart_oracle(const Rational& epsilon, int precision_bits) {
  require_epsilon(epsilon);
  ExpTerm t = unit_term(1);
  t.coeff = epsilon * epsilon;
  t.pows[0] = AlphaExponent{-1, 0};
  ExpPoly g(1, Alpha(1), {t});
  std::vector<AxisAffine> affine{
      AxisAffine{Real(Rational(1 - epsilon), precision_bits), Real(epsilon, precision_bits)}};
  return std::make_shared<ExpPolyOracle>(std::move(g), precision_bits, std::move(affine));
}

ProbeReport nonuniformity_probe(std::vector<Rational> epsilons, int n_max, const GridSpec& grid) {
  if (epsilons.empty()) throw std::invalid_argument("nonuniformity_probe: no epsilon given");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  ProbeReport rep;
  rep.monotone = true;
  bool all_meet = true;
  for (const Rational& eps : epsilons) {
    OraclePtr g = naive_chart_oracle(eps);
    FitResult fit = fit_constants(*g, Rational(0), n_max, grid);
    ProbeRow row{eps, fit.A_fitted, Real(Rational(Rational(1, 2) / eps), kCertPrecisionBits), false};
    row.meets_lower_bound = row.A0 >= row.lower_bound;
    all_meet = all_meet && row.meets_lower_bound;
    if (!rep.rows.empty() && !(row.A0 > rep.rows.back().A0)) rep.monotone = false;
    rep.rows.push_back(std::move(row));
  }
  rep.pass = all_meet && rep.monotone;
  return rep;
}

// ---------------------------------------------------------------------------
// Units

Unit Unit::constant_unit(const Rational& c) {
  if (sgn(c) == 0) throw std::invalid_argument("constant unit must be nonzero");
  Unit u;
  u.kind = Kind::kConstant;
  u.constant = c;
  return u;
}

Unit Unit::reciprocal_one_plus() {
  Unit u;
  u.kind = Kind::kReciprocalOnePlus;
  return u;
}

Unit Unit::polynomial(std::vector<Rational> coeffs) {
  while (!coeffs.empty() && sgn(coeffs.back()) == 0) coeffs.pop_back();
  if (coeffs.empty()) throw std::invalid_argument("polynomial unit must be nonzero");
  Unit u;
  u.kind = Kind::kPolynomial;
  u.coeffs = std::move(coeffs);
  return u;
}

Real Unit::derivative(int k, const Real& y) const {
  const int bits = y.precision();
  switch (kind) {
    case Kind::kConstant:
      return k == 0 ? Real(constant, bits) : Real(0L, bits);
    case Kind::kReciprocalOnePlus: {
      // (-1)^k k! (1+y)^(-k-1)
      Real v = factorial_real(static_cast<unsigned long>(k), bits) /
               pow(Real(1L, bits) + y, static_cast<long>(k + 1));
      return k % 2 ? -v : v;
    }
    case Kind::kPolynomial: {
      Real acc(0L, bits);
      for (std::size_t i = coeffs.size(); i-- > static_cast<std::size_t>(k);) {
        // coeffs[i] i!/(i-k)! y^(i-k), Horner in y
        Rational falling = coeffs[i];
        for (int j = 0; j < k; ++j) falling *= static_cast<long>(i) - j;
        acc = acc * y + Real(falling, bits);
      }
      return acc;
    }
  }
  return Real(0L, bits);
}

MildCert Unit::cert() const {
  switch (kind) {
    case Kind::kConstant:
      return make_cert(Constant::exact(0), Constant::exact(q_abs(constant)), 0);
    case Kind::kReciprocalOnePlus:
      // |F^(k)(y)| = k! / (1+y)^(k+1) <= k! on [0, 1]
      return make_cert(Constant::exact(1), Constant::exact(1), 0);
    case Kind::kPolynomial: {
      // |F^(k)(y)| <= k! sum_i |c_i| binom(i, k) on |y| <= 1
      Rational best = 0;
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        Rational s = 0;
        for (std::size_t i = k; i < coeffs.size(); ++i) {
          Integer binom;
          mpz_bin_uiui(binom.get_mpz_t(), i, k);
          s += q_abs(coeffs[i]) * Rational(binom);
        }
        best = std::max(best, s);
      }
      return make_cert(Constant::exact(1), Constant::exact(best), 0);
    }
  }
  throw std::logic_error("unknown unit");
}

void Unit::check_zero_free(const Rational& lo, const Rational& hi) const {
  switch (kind) {
    case Kind::kConstant:
      return;
    case Kind::kReciprocalOnePlus:
      if (lo <= -1) throw std::invalid_argument("unit 1/(1+y) has a pole at y = -1 inside the image");
      return;
    case Kind::kPolynomial:
      break;
  }
  // On [c - r, c + r]: |F(y) - F(c)| <= sum_{k>=1} |F^(k)(c)| / k! r^k.
  auto value_at_q = [&](const Rational& y, std::size_t k) {
    Rational acc = 0;
    for (std::size_t i = coeffs.size(); i-- > k;) {
      Integer binom;
      mpz_bin_uiui(binom.get_mpz_t(), i, k);
      acc = acc * y + coeffs[i] * Rational(binom);
    }
    return acc;  // F^(k)(y) / k!
  };
  std::vector<std::pair<Rational, Rational>> stack{{lo, hi}};
  std::size_t budget = 1 << 16;
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    Rational c = (a + b) / 2, r = (b - a) / 2;
    Rational center = q_abs(value_at_q(c, 0));
    Rational slack = 0, rk = 1;
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
      rk *= r;
      slack += q_abs(value_at_q(c, k)) * rk;
    }
    if (center > slack) continue;
    if (sgn(center) == 0 || --budget == 0) {
      throw std::invalid_argument("unit " + name() + " vanishes (or cannot be certified zero-free) near y = " +
                                  to_string(Rational(c)));
    }
    stack.push_back({a, c});
    stack.push_back({c, b});
  }
}

std::string Unit::name() const {
  switch (kind) {
    case Kind::kConstant: return "const(" + to_string(constant) + ")";
    case Kind::kReciprocalOnePlus: return "1/(1+y)";
    case Kind::kPolynomial: {
      std::string s = "poly(";
      for (std::size_t i = 0; i < coeffs.size(); ++i) s += (i ? "," : "") + to_string(coeffs[i]);
      return s + ")";
    }
  }
  return "?";
}

Chart abm_chart(const ABMSpec& spec, const Alpha& alpha, int precision_bits) {
  if (spec.monomials.empty()) throw std::invalid_argument("abm_chart: b has no components");
  const std::size_t m = spec.monomials[0].size();
  if (m == 0) throw std::invalid_argument("abm_chart: monomials must have positive arity");
  for (const auto& mu : spec.monomials) {
    if (mu.size() != m) throw std::invalid_argument("abm_chart: monomials differ in arity");
    compute_M(mu);  // throws with the offending index when a partial is unbounded
  }
  if (spec.j >= spec.monomials.size()) throw std::invalid_argument("abm_chart: j out of range");
  const int bits = precision_bits;

  std::vector<Rational> lo = spec.box_lo.empty() ? std::vector<Rational>(m, Rational(0)) : spec.box_lo;
  std::vector<Rational> hi = spec.box_hi.empty() ? std::vector<Rational>(m, Rational(1)) : spec.box_hi;
  if (lo.size() != m || hi.size() != m) throw std::invalid_argument("abm_chart: box dimension must equal m");
  std::vector<AxisAffine> affine;
  for (std::size_t i = 0; i < m; ++i) {
    if (sgn(lo[i]) < 0 || hi[i] > 1 || !(lo[i] < hi[i])) {
      throw std::invalid_argument("abm_chart: box must be a nonempty sub-box of the unit cube");
    }
    Real u_lo = p_alpha_inverse(Real(lo[i], bits), alpha);
    Real u_hi = p_alpha_inverse(Real(hi[i], bits), alpha);
    affine.push_back(AxisAffine{u_hi - u_lo, u_lo});
  }

  // b_1 maps the cube into [0, 1]; the unit must not vanish there.
  spec.unit.check_zero_free(Rational(0), Rational(1));

  const auto& mu1 = spec.monomials[0];
  const auto& muj = spec.monomials[spec.j];
  ExpPoly b1 = construct(BasicKind::kExpOfLinear, m, alpha.value(), mu1);
  ExpPoly bj = construct(BasicKind::kExpOfLinear, m, alpha.value(), muj);
  auto b1_oracle = std::make_shared<ExpPolyOracle>(b1, bits, affine);
  auto bj_oracle = std::make_shared<ExpPolyOracle>(bj, bits, affine);
  Unit unit = spec.unit;
  auto unit_oracle = std::make_shared<ComposeOracle>(
      [unit](int k, const Real& y) { return unit.derivative(k, y); }, b1_oracle);
  auto f_oracle = std::make_shared<ProductOracle>(bj_oracle, unit_oracle);

  MildCert bj_cert = abm_compose_cert(muj, m, alpha, compute_M(muj));
  MildCert b1_cert = abm_compose_cert(mu1, m, alpha, compute_M(mu1));
  // A constant unit has no derivatives to compose: F(b) is bounded by |c|.
  MildCert unit_cert = spec.unit.kind == Unit::Kind::kConstant ? spec.unit.cert()
                                                               : compose_certs(spec.unit.cert(), b1_cert);
  MildCert cert = product_certs(bj_cert, unit_cert);

  Chart chart;
  chart.id = ChartId::kAbm;
  chart.parameter = 0;
  chart.delta = affine[0].offset;
  chart.components = {{"b_j", bj_oracle, bj}, {"F(b)", unit_oracle, std::nullopt}, {"f", f_oracle, std::nullopt}};
  chart.cert = cert;
  return chart;
}

Rational coefficient_value(Coefficient a, const Rational& t) {
  switch (a) {
    case Coefficient::kOne: return 1;
    case Coefficient::kIdentity: return t;
    case Coefficient::kSquare: return t * t;
    case Coefficient::kReciprocalOnePlus: return Rational(1) / (1 + t);
  }
  return 0;
}

std::string to_string(Coefficient a) {
  switch (a) {
    case Coefficient::kOne: return "one";
    case Coefficient::kIdentity: return "t";
    case Coefficient::kSquare: return "t^2";
    case Coefficient::kReciprocalOnePlus: return "1/(1+t)";
  }
  return "?";
}

Coefficient parse_coefficient(const std::string& name) {
  if (name == "one" || name == "1") return Coefficient::kOne;
  if (name == "t") return Coefficient::kIdentity;
  if (name == "t^2" || name == "t2") return Coefficient::kSquare;
  if (name == "1/(1+t)" || name == "recip") return Coefficient::kReciprocalOnePlus;
  throw std::invalid_argument("unknown coefficient function '" + name + "' (one, t, t^2, 1/(1+t))");
}

FamilyParam family_abm_charts(const FamilySpec& spec, std::vector<Rational> ts, const Alpha& alpha,
                              int precision_bits) {
  if (ts.empty()) throw std::invalid_argument("family_abm_charts: no parameter values");
  const std::vector<Rational> mu{spec.r};
  // r >= 1 keeps t-uniform first-order partials; compute_M rejects r < 1.
  const Constant M = compute_M(mu);
  const MildCert cert = abm_compose_cert(mu, 1, alpha, M);
  const int bits = precision_bits;

  FamilyParam family;
  family.alpha = alpha;
  family.parameter_name = "t";
  family.parameters = ts;
  family.uniform_cert = cert;
  for (const Rational& t : ts) {
    if (sgn(t) < 0 || t > 1 || (spec.wall && t >= 1)) {
      throw std::invalid_argument("family_abm_charts: parameter " + to_string(t) + " outside the admissible range");
    }
    ExpPoly g = construct(BasicKind::kExpOfLinear, 1, alpha.value(), mu) * coefficient_value(spec.a, t);
    std::vector<AxisAffine> affine;
    Real delta(0L, bits);
    if (spec.wall) {
      delta = p_alpha_inverse(Real(t, bits), alpha);
      affine.push_back(AxisAffine{Real(1L, bits) - delta, delta});
    }
    auto oracle = std::make_shared<ExpPolyOracle>(g, bits, affine);
    Chart chart{ChartId::kAbm, t, delta, {{"f", oracle, g}}, cert};
    family.charts.push_back({std::move(chart)});
  }
  return family;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const Chart& chart) {
  nlohmann::json comps = nlohmann::json::array(), names = nlohmann::json::array();
  nlohmann::json affine = nullptr;
  for (const ChartComponent& c : chart.components) {
    comps.push_back(c.exact ? to_json(*c.exact) : nlohmann::json(nullptr));
    names.push_back(c.name);
    auto* e = dynamic_cast<const ExpPolyOracle*>(c.oracle.get());
    if (affine.is_null() && e && !e->affine().empty()) {
      affine = nlohmann::json::array();
      for (const AxisAffine& a : e->affine()) {
        affine.push_back({{"scale", a.scale.to_string(25)}, {"offset", a.offset.to_string(25)}});
      }
      if (affine.size() == 1) affine = affine[0];
    }
  }
  return {{"id", to_string(chart.id)},
          {"parameter", to_string(chart.parameter)},
          {"delta", chart.delta.to_string(25)},
          {"components", std::move(comps)},
          {"component_names", std::move(names)},
          {"affine", std::move(affine)},
          {"cert", to_json(chart.cert)}};
}

nlohmann::json to_json(const CoverageReport& r) {
  nlohmann::json ranges = nlohmann::json::array();
  for (const ChartRange& cr : r.ranges) {
    nlohmann::json j{{"chart", to_string(cr.id)}, {"hits", cr.hits}};
    if (cr.hits) {
      j["t_min"] = cr.t_min.to_string(20);
      j["t_max"] = cr.t_max.to_string(20);
    }
    ranges.push_back(std::move(j));
  }
  return {{"epsilon", to_string(r.epsilon)},
          {"samples", r.samples},
          {"on_curve_exact", r.on_curve_exact},
          {"tiles", r.tiles},
          {"max_distance", r.max_distance.to_string(6)},
          {"tolerance", r.tolerance.to_string(6)},
          {"ranges", std::move(ranges)},
          {"uncovered", r.uncovered},
          {"pass", r.pass}};
}

nlohmann::json to_json(const UniformReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const UniformEntry& e : r.entries) {
    entries.push_back({{"parameter", to_string(e.parameter)},
                       {"chart", to_string(e.chart)},
                       {"component", e.component},
                       {"report", to_json(e.report)}});
  }
  return {{"entries", std::move(entries)}, {"pass", r.pass}};
}

nlohmann::json to_json(const ProbeReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ProbeRow& row : r.rows) {
    rows.push_back({{"epsilon", to_string(row.epsilon)},
                    {"A0", row.A0.to_string(12)},
                    {"lower_bound", row.lower_bound.to_string(12)},
                    {"meets_lower_bound", row.meets_lower_bound}});
  }
  return {{"rows", std::move(rows)}, {"monotone", r.monotone}, {"pass", r.pass}};
}

}  // namespace mildkit
