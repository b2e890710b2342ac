#include <cmath>

#include <gtest/gtest.h>

#include "mildkit/lemmas.h"
#include "mildkit/parametrize.h"
#include "mildkit/verify.h"

namespace mildkit {
namespace {

double as_double(const Constant& c) { return c.value().to_double(); }

OraclePtr p_oracle(const Rational& a) {
  return std::make_shared<ExpPolyOracle>(construct(BasicKind::kPAlpha, 1, a));
}

GridSpec small_grid() {
  GridSpec g;
  g.points = 128;
  g.points_per_axis = 16;
  return g;
}

TEST(PAlphaCert, PaperConstants) {
  MildCert c1 = p_alpha_cert(Alpha(1));
  EXPECT_EQ(c1.A, Constant::exact(6));
  EXPECT_EQ(c1.B, Constant::e());
  EXPECT_EQ(c1.C, 1);
  MildCert c2 = p_alpha_cert(Alpha(2));
  EXPECT_EQ(c2.A, Constant::exact(12));
  EXPECT_EQ(c2.C, Rational(1, 2));
  MildCert ch = p_alpha_cert(Alpha(Rational(1, 2)));
  EXPECT_EQ(ch.A, Constant::exact(48));
  EXPECT_EQ(ch.B, Constant::e());
  EXPECT_EQ(ch.C, 2);
  EXPECT_EQ(c1.B.to_string(), "e");
}

TEST(ComposeCerts, ZeroGevreyIndexExamples) {
  MildCert one = make_cert(Constant::exact(1), Constant::exact(1), 0);
  MildCert c = compose_certs(one, one);
  EXPECT_EQ(c.A, Constant::exact(2));
  EXPECT_EQ(c.B, Constant::exact(Rational(1, 2)));
  EXPECT_EQ(c.C, 0);

  MildCert f = make_cert(Constant::exact(2), Constant::exact(3), 0);
  MildCert d = compose_certs(f, one);
  EXPECT_EQ(d.A, Constant::exact(3));
  EXPECT_EQ(d.B, Constant::exact(2));
  EXPECT_TRUE(d.B < f.B);
}

TEST(ComposeCerts, RootReductionForMixedIndex) {
  MildCert f = make_cert(Constant::exact(1), Constant::exact(1), 1);
  MildCert g = make_cert(Constant::exact(1), Constant::exact(1), 0);
  MildCert c = compose_certs(f, g);
  EXPECT_EQ(c.C, 1);
  // roots are all 1: A = (1 (1 + 1))^2 = 4, B = (1/2)^2 = 1/4
  EXPECT_EQ(c.A, Constant::exact(4));
  EXPECT_EQ(c.B, Constant::exact(Rational(1, 4)));
}

// A general-C composite re-verified on a concrete pair: P_1 ∘ id.
TEST(ComposeCerts, GeneralIndexVerifiesOnConcretePair) {
  MildCert id = make_cert(Constant::exact(1), Constant::exact(1), 0);
  MildCert c = compose_certs(p_alpha_cert(Alpha(1)), id);
  EXPECT_EQ(c.C, 1);
  BoundReport r = verify_cert(*p_oracle(1), c, 12);
  EXPECT_TRUE(r.pass);
}

TEST(ComposeCerts, RejectsWeakAndConstantOuter) {
  MildCert weak = make_cert(Constant::exact(1), Constant::exact(1), 0, CertKind::kWeaklyMild);
  MildCert one = make_cert(Constant::exact(1), Constant::exact(1), 0);
  EXPECT_THROW(compose_certs(weak, one), std::invalid_argument);
  EXPECT_THROW(compose_certs(one, weak), std::invalid_argument);
  MildCert flat = make_cert(Constant::exact(0), Constant::exact(1), 0);
  EXPECT_THROW(compose_certs(flat, one), std::invalid_argument);
}

TEST(ProductCerts, LeibnizConstants) {
  MildCert a = make_cert(Constant::exact(1), Constant::exact(1), 0);
  MildCert b = make_cert(Constant::exact(2), Constant::exact(3), 0);
  MildCert p = product_certs(a, b);
  EXPECT_EQ(p.A, Constant::exact(3));
  EXPECT_EQ(p.B, Constant::exact(3));
  EXPECT_EQ(p.C, 0);
  MildCert q = product_certs(b, a);
  EXPECT_EQ(p.A, q.A);
  EXPECT_EQ(p.B, q.B);
  MildCert constant = make_cert(Constant::exact(0), Constant::exact(5), 0);
  MildCert s = product_certs(a, constant);
  EXPECT_EQ(s.A, Constant::exact(1));
  EXPECT_EQ(s.B, Constant::exact(5));
}

TEST(ProductCerts, VerifiesOnProductOfPAlphas) {
  auto prod = std::make_shared<ProductOracle>(p_oracle(1), p_oracle(1));
  MildCert c = product_certs(p_alpha_cert(Alpha(1)), p_alpha_cert(Alpha(1)));
  EXPECT_TRUE(verify_cert(*prod, c, 12).pass);
}

TEST(WeakComposeCert, Constants) {
  MildCert c = weak_compose_cert(Constant::exact(1), Constant::exact(1), Alpha(1));
  EXPECT_NEAR(as_double(c.A), 16.0, 1e-12);
  EXPECT_EQ(c.B, Constant::e());
  EXPECT_EQ(c.C, 2);
  // Large alpha: A' ~ 4 alpha
  MildCert big = weak_compose_cert(Constant::exact(1), Constant::exact(1), Alpha(1000));
  EXPECT_NEAR(as_double(big.A) / 4000.0, 1.0, 1e-2);
  EXPECT_EQ(big.C, Rational(1001, 1000));
  EXPECT_THROW(weak_compose_cert(Constant::exact(1), Constant::exact(1), Alpha(Rational(1, 2))),
               std::invalid_argument);
}

TEST(ComputeM, ClosedForms) {
  const std::vector<Rational> m11{1, 1}, m12{1, 2}, m00{0, 0}, bad{Rational(1, 2), 1}, neg{-1, 1};
  EXPECT_EQ(compute_M(m11), Constant::exact(1, Rational(-1, 2)));
  EXPECT_EQ(compute_M(m12), Constant::exact(1, -1));
  EXPECT_EQ(compute_M(m00), Constant::exact(1));
  try {
    compute_M(bad);
    FAIL() << "expected a precondition error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("x_0"), std::string::npos);
  }
  EXPECT_THROW(compute_M(neg), std::invalid_argument);
}

TEST(AbmComposeCert, Constants) {
  const std::vector<Rational> m11{1, 1}, m12{1, 2}, m00{0, 0};
  MildCert c11 = abm_compose_cert(m11, 2, Alpha(1), compute_M(m11));
  EXPECT_EQ(c11.A, Constant::exact(10));
  EXPECT_EQ(c11.C, 1);
  EXPECT_EQ(c11.B, Constant::e());
  MildCert c12 = abm_compose_cert(m12, 2, Alpha(1), compute_M(m12));
  EXPECT_EQ(c12.A, Constant::exact(18));
  EXPECT_EQ(c12.B, Constant::e());
  MildCert c00 = abm_compose_cert(m00, 2, Alpha(2), compute_M(m00));
  EXPECT_EQ(c00.A, Constant::exact(4));
  EXPECT_EQ(c00.B, Constant::exact(1));
  EXPECT_THROW(abm_compose_cert(m11, 2, Alpha(Rational(1, 2)), compute_M(m11)), std::invalid_argument);
}

TEST(MildCertBound, StrictlyIncreasingForAAtLeastOne) {
  MildCert c = p_alpha_cert(Alpha(1));
  for (int n = 0; n < 20; ++n) EXPECT_LT(c.bound(n), c.bound(n + 1));
  EXPECT_THROW(make_cert(Constant::exact(1), Constant::exact(0), 0), std::invalid_argument);
  EXPECT_THROW(make_cert(Constant::exact(1), Constant::exact(1), -1), std::invalid_argument);
}

TEST(VerifyCert, POneAgainstPaperCert) {
  BoundReport r = verify_cert(*p_oracle(1), p_alpha_cert(Alpha(1)), 20);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.orders.size(), 21u);
  // sup |P_1'| = max x^-2 e^(1-1/x) = 4/e at x = 1/2
  const double four_over_e = 4.0 / std::exp(1.0);
  EXPECT_NEAR(r.orders[1].sup.to_double() / four_over_e, 1.0, 1e-12);
  EXPECT_NEAR(r.orders[1].witness[0].to_double(), 0.5, 1e-9);
  EXPECT_NEAR(r.orders[1].bound.to_double(), 6 * std::exp(1.0), 1e-12);
  for (const OrderRecord& o : r.orders) EXPECT_GE(o.margin.sign(), 0);
}

TEST(VerifyCert, FalseCertificateFailsEarly) {
  MildCert bad = make_cert(Constant::exact(1), Constant::exact(1), 0);
  BoundReport r = verify_cert(*p_oracle(1), bad, 5);
  EXPECT_FALSE(r.pass);
  // Order 0 is attained exactly (P_1(1) = 1 = B): a tie, not a violation.
  EXPECT_LT(abs(r.orders[0].margin).to_double(), 1e-60);
  // Order 1: 4/e > 1.
  EXPECT_NEAR(r.orders[1].margin.to_double(), 1 - 4 / std::exp(1.0), 1e-12);
}

TEST(VerifyCert, ExactlyAttainedBoundPasses) {
  BoundReport r = verify_cert(*p_oracle(1), make_cert(Constant::exact(0), Constant::exact(1), 0), 0);
  EXPECT_TRUE(r.pass);
}

TEST(VerifyCert, ConstantFunctionHasZeroDerivatives) {
  BoundReport r = verify_cert(*constant_oracle(1, Rational(1, 2)), make_cert(Constant::exact(1), Constant::exact(1), 0), 6);
  EXPECT_TRUE(r.pass);
  for (std::size_t n = 1; n < r.orders.size(); ++n) EXPECT_TRUE(r.orders[n].sup.is_zero());
}

TEST(VerifyCert, BivariateExpLinear) {
  const std::vector<Rational> mu{1, 2};
  ExpPolyOracle o(construct(BasicKind::kExpOfLinear, 2, 1, mu));
  MildCert c = abm_compose_cert(mu, 2, Alpha(1), compute_M(mu));
  BoundReport r = verify_cert(o, c, 4, small_grid());
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.orders.size(), 15u);  // all nu with |nu| <= 4 in two variables
}

TEST(VerifyCert, JsonSchema) {
  BoundReport r = verify_cert(*p_oracle(1), p_alpha_cert(Alpha(1)), 2);
  nlohmann::json j = to_json(r);
  for (const char* key : {"A", "B", "C", "kind"}) EXPECT_TRUE(j["cert"].contains(key)) << key;
  EXPECT_EQ(j["cert"]["C"], "1/1");
  ASSERT_EQ(j["orders"].size(), 3u);
  for (const char* key : {"nu", "sup", "bound", "margin", "witness"}) EXPECT_TRUE(j["orders"][1].contains(key)) << key;
  EXPECT_EQ(j["pass"], true);
}

TEST(VerifyCert, GridRefinementStable) {
  GridSpec coarse, fine;
  fine.points = 2048;
  BoundReport a = verify_cert(*p_oracle(2), p_alpha_cert(Alpha(2)), 10, coarse);
  BoundReport b = verify_cert(*p_oracle(2), p_alpha_cert(Alpha(2)), 10, fine);
  for (std::size_t n = 0; n < a.orders.size(); ++n) {
    Real rel = abs(a.orders[n].sup - b.orders[n].sup) / b.orders[n].sup;
    EXPECT_LT(rel.to_double(), 1e-6) << "n=" << n;
  }
}

// x^(1/2) is weakly (1,1,0)-mild: |d^n x^r| = |r(r-1)...(r-n+1)| x^(r-n) <= n! / x^n.
TEST(WeakMild, SquareRootIsWeaklyMild) {
  const std::vector<Rational> half{Rational(1, 2)};
  ExpPolyOracle root(construct(BasicKind::kMonomial, 1, 1, half));
  MildCert weak = make_cert(Constant::exact(1), Constant::exact(1), 0, CertKind::kWeaklyMild);
  EXPECT_TRUE(verify_cert(root, weak, 10).pass);
}

// Its derivative (1/2) x^(-1/2) is unbounded, so it is not weakly (1,1,0)-mild
// at order 0 on (0,1).
TEST(WeakMild, SquareRootDerivativeIsNotWeaklyMild) {
  const std::vector<Rational> minus_half{Rational(-1, 2)};
  ExpPolyOracle d(construct(BasicKind::kMonomial, 1, 1, minus_half) * Rational(1, 2));
  MildCert weak = make_cert(Constant::exact(1), Constant::exact(1), 0, CertKind::kWeaklyMild);
  BoundReport r = verify_cert(d, weak, 4);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.orders[0].margin.sign(), 0);
}

TEST(WeakMild, ComposedWithPAlphaPassesWeakComposeCert) {
  const Rational half(1, 2);
  ExpPolyOracle f(construct(BasicKind::kExpOfLinear, 1, 1, std::span(&half, 1)));
  MildCert c = weak_compose_cert(Constant::exact(1), Constant::exact(1), Alpha(1));
  EXPECT_TRUE(verify_cert(f, c, 12).pass);
}

TEST(FitConstants, POneWithinPaperConstant) {
  FitResult fit = fit_constants(*p_oracle(1), 1, 10);
  EXPECT_LE(fit.A_fitted.to_double(), 6.0);
  EXPECT_GT(fit.A_fitted.to_double(), 0.0);
  EXPECT_EQ(fit.B_fitted.to_double(), 1.0);
  EXPECT_TRUE(verify_cert(*p_oracle(1), fit.as_cert(), 10).pass);
}

TEST(FitConstants, ConstantFunction) {
  FitResult fit = fit_constants(*constant_oracle(1, Rational(1, 2)), 0, 5);
  EXPECT_EQ(fit.B_fitted.to_double(), 1.0);
  EXPECT_TRUE(fit.A_fitted.is_zero());
}

TEST(FitConstants, NaiveChartAtTwoToMinusEight) {
  FitResult fit = fit_constants(*naive_chart_oracle(Rational(1, 256)), 0, 30);
  EXPECT_GE(fit.A_fitted.to_double(), 128.0);
}

TEST(FitConstants, MultivariateRejected) {
  const std::vector<Rational> mu{1, 1};
  ExpPolyOracle o(construct(BasicKind::kExpOfLinear, 2, 1, mu));
  EXPECT_THROW(fit_constants(o, 1, 3), std::invalid_argument);
}

TEST(Umild, Examples) {
  UmildReport r1 = check_umild(Alpha(1), 2);
  EXPECT_EQ(r1.rows[1].rising, 2);
  EXPECT_EQ(r1.rows[1].bound, 2);
  EXPECT_TRUE(r1.rows[1].tight);
  UmildReport r2 = check_umild(Alpha(2), 3);
  EXPECT_EQ(r2.rows[2].rising, 24);
  EXPECT_EQ(r2.rows[2].bound, 48);
  EXPECT_TRUE(r2.rows[2].holds);
  UmildReport rh = check_umild(Alpha(Rational(1, 2)), 3);
  EXPECT_EQ(rh.rows[2].rising, Rational(15, 8));
  EXPECT_EQ(rh.rows[2].bound, 6);
  EXPECT_THROW(check_umild(Alpha(1), 0), std::invalid_argument);
}

TEST(Umild, SweepHoldsAndIsTightAtOne) {
  for (const Rational& a : {Rational(1, 3), Rational(1, 2), Rational(1), Rational(3, 2), Rational(2), Rational(5, 2)}) {
    UmildReport r = check_umild(Alpha(a), 30);
    EXPECT_TRUE(r.pass) << to_string(a);
    for (const UmildRow& row : r.rows) {
      EXPECT_TRUE(row.constant_in_x);
      if (a == 1) EXPECT_TRUE(row.tight) << row.k;
    }
  }
}

TEST(Expmild, Examples) {
  ExpmildReport a = check_expmild(1, 1, Alpha(1));
  EXPECT_TRUE(a.pass);
  EXPECT_NEAR(a.closed_form.to_double(), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(a.closed_argmax.to_double(), 1.0, 1e-15);
  ExpmildReport b = check_expmild(2, 1, Alpha(1));
  EXPECT_NEAR(b.closed_form.to_double(), std::pow(2 / std::exp(1.0), 2), 1e-15);
  EXPECT_NEAR(b.numeric_argmax.to_double(), 0.5, 1e-12);
  ExpmildReport c = check_expmild(1, Rational(1, 2), Alpha(2));
  EXPECT_NEAR(c.closed_form.to_double(), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(c.closed_argmax.to_double(), 1.0, 1e-15);
  EXPECT_THROW(check_expmild(0, 1, Alpha(1)), std::invalid_argument);
}

TEST(GfCheck, Examples) {
  GfReport ones = gf_check(1, 1, 1, 1, 3);
  EXPECT_TRUE(ones.pass);
  EXPECT_EQ(ones.rows[0].via_chain_rule, 1);
  EXPECT_EQ(ones.rows[2].via_chain_rule, 24);
  GfReport r = gf_check(2, 1, 1, 1, 2);
  EXPECT_EQ(r.rows[1].via_chain_rule, 12);
  EXPECT_EQ(r.rows[1].closed_form, 12);
  EXPECT_THROW(gf_check(0, 1, 1, 1, 2), std::invalid_argument);
}

TEST(GfCheck, SmallLattice) {
  for (const Rational& af : {Rational(1, 2), Rational(2)}) {
    for (const Rational& bg : {Rational(1, 2), Rational(2)}) {
      EXPECT_TRUE(gf_check(af, 1, Rational(1, 2), bg, 10).pass);
    }
  }
}

TEST(Oracles, ComposeMatchesSymbolic) {
  const Rational a(3, 2);
  auto u = std::make_shared<ExpPolyOracle>(construct(BasicKind::kUAlpha, 1, a));
  ComposeOracle composed([](int, const Real& y) { return exp(y); }, u);
  ExpPolyOracle direct(construct(BasicKind::kPAlpha, 1, a));
  const std::vector<Real> x{Real(Rational(3, 5), 256)};
  for (int n = 0; n <= 8; ++n) {
    HPReal c = composed.value(MultiIndex({n}), x), d = direct.value(MultiIndex({n}), x);
    EXPECT_LE(abs(c.value - d.value), c.abs_error + d.abs_error) << n;
  }
}

TEST(Oracles, ProductMatchesSymbolic) {
  auto p = p_oracle(1);
  ProductOracle prod(p, p);
  const std::vector<Rational> two{2};
  ExpPolyOracle direct(construct(BasicKind::kExpOfLinear, 1, 1, two));
  const std::vector<Real> x{Real(Rational(1, 3), 256)};
  for (int n = 0; n <= 8; ++n) {
    HPReal c = prod.value(MultiIndex({n}), x), d = direct.value(MultiIndex({n}), x);
    EXPECT_LE(abs(c.value - d.value), c.abs_error + d.abs_error) << n;
  }
}

}  // namespace
}  // namespace mildkit
