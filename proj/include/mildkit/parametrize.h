#ifndef MILDKIT_PARAMETRIZE_H_
#define MILDKIT_PARAMETRIZE_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mildkit/cert.h"
#include "mildkit/oracle.h"
#include "mildkit/verify.h"

namespace mildkit {

// P_alpha^(-1)(y) = (1 - ln y)^(-1/alpha) for y in (0, 1].
Real p_alpha_inverse(const Real& y, const Alpha& alpha);

enum class ChartId { kMain, kSwapped, kPoint, kAbm };
std::string to_string(ChartId id);

struct ChartComponent {
  std::string name;
  OraclePtr oracle;             // derivatives in the chart parameter t
  std::optional<ExpPoly> exact; // closed form in the pre-affine variable u, if any
};

struct Chart {
  ChartId id = ChartId::kMain;
  Rational parameter;           // epsilon for the hyperbola family, t for a-b-m families
  Real delta{kDefaultPrecisionBits};
  std::vector<ChartComponent> components;
  MildCert cert;
};

struct FamilyParam {
  Alpha alpha{1};
  std::string parameter_name = "epsilon";
  std::vector<Rational> parameters;
  std::vector<std::vector<Chart>> charts;  // charts[i] belong to parameters[i]
  MildCert uniform_cert;
};

// Three charts covering {xy = eps^2} ∩ (0,1)^2:
//   main     t -> (P(u), eps^2 / P(u)),  u = (1 - delta) t + delta, delta = P^(-1)(eps)
//   swapped  main with the coordinates exchanged
//   point    (eps, eps)
std::vector<Chart> yomdin_charts(const Rational& epsilon, const Alpha& alpha,
                                 const MildCert& cert,
                                 int precision_bits = kDefaultPrecisionBits);

// How the shared certificate is fitted (C = 1/alpha, orders <= n_fit; A and
// B are then multiplied by `safety`).
//   kEnvelope:        epsilon-free majorants. x^(n) <= sup|P^(n)| and, since
//                     eps^2 = E(delta)^2 <= E(u)^2 for u >= delta with
//                     E = exp(1 - u^-alpha), |y^(n)| <= sup_u |E^2 (1/E)^(n)|.
//   kLargestEpsilon:  both main-chart components at the largest epsilon only.
//                     Does not control small epsilon; kept for comparison.
enum class UniformFit { kEnvelope, kLargestEpsilon };

MildCert fit_uniform_cert(const Alpha& alpha, const Rational& largest_epsilon, int n_fit,
                          UniformFit method = UniformFit::kEnvelope, const GridSpec& grid = {},
                          const Rational& safety = 2, int precision_bits = kDefaultPrecisionBits);

FamilyParam yomdin_family(const Alpha& alpha, std::vector<Rational> epsilons, int n_fit,
                          UniformFit method = UniformFit::kEnvelope, const GridSpec& grid = {},
                          const Rational& safety = 2, int precision_bits = kDefaultPrecisionBits);

// Same charts, caller-provided certificate.
FamilyParam yomdin_family_with_cert(const Alpha& alpha, std::vector<Rational> epsilons,
                                    const MildCert& cert,
                                    int precision_bits = kDefaultPrecisionBits);

struct ChartRange {
  ChartId id;
  std::size_t hits = 0;
  Real t_min;
  Real t_max;
};

struct CoverageReport {
  Rational epsilon;
  std::size_t samples = 0;
  bool on_curve_exact = false;
  bool tiles = false;
  Real max_distance;
  Real tolerance;
  std::vector<ChartRange> ranges;
  std::vector<std::string> uncovered;
  bool pass = false;
};

std::vector<CoverageReport> verify_family(const FamilyParam& family, std::size_t samples);

struct UniformEntry {
  Rational parameter;
  ChartId chart;
  std::string component;
  BoundReport report;
};

struct UniformReport {
  std::vector<UniformEntry> entries;
  bool pass = true;
};

// verify_cert with the family's shared certificate on every chart component.
// Components shared between charts (the swapped chart reuses the main
// chart's oracles) are verified once.
UniformReport uniform_verify(const FamilyParam& family, int n_max, const GridSpec& grid = {});

// Naive chart t -> eps^2 / ((1 - eps) t + eps) on (0,1).
OraclePtr naive_chart_oracle(const Rational& epsilon, int precision_bits = kDefaultPrecisionBits);

struct ProbeRow {
  Rational epsilon;
  Real A0;
  Real lower_bound;  // 0.5 / eps
  bool meets_lower_bound = false;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;  // sorted by decreasing epsilon
  bool monotone = false;
  bool pass = false;
};

inline constexpr int kProbeDefaultOrder = 30;

ProbeReport nonuniformity_probe(std::vector<Rational> epsilons, int n_max = kProbeDefaultOrder,
                                const GridSpec& grid = {});

// Built-in units F, analytic and zero-free on a neighbourhood of [0, 1].
struct Unit {
  enum class Kind { kConstant, kReciprocalOnePlus, kPolynomial };
  Kind kind = Kind::kConstant;
  Rational constant = 1;
  std::vector<Rational> coeffs;  // polynomial: sum coeffs[i] y^i

  static Unit constant_unit(const Rational& c);
  static Unit reciprocal_one_plus();
  static Unit polynomial(std::vector<Rational> coeffs);

  Real derivative(int k, const Real& y) const;
  // Valid for arguments in [0, 1].
  MildCert cert() const;
  // Certifies |F| > 0 on [lo, hi] by interval subdivision; throws otherwise.
  void check_zero_free(const Rational& lo, const Rational& hi) const;
  std::string name() const;
};

struct ABMSpec {
  std::vector<std::vector<Rational>> monomials;  // components of b; all of arity m
  std::size_t j = 0;                             // f = b_j * F(b_1)
  Unit unit;
  std::vector<Rational> box_lo;                  // empty = unit cube
  std::vector<Rational> box_hi;
};

// f∘P on the pre-image of the box, affinely reparametrized from (0,1)^m.
// Components: "b_j", "F(b)", "f". The certificate is
// product_certs(abm_compose_cert(mu_j), compose_certs(unit cert, abm_compose_cert(mu_1))).
Chart abm_chart(const ABMSpec& spec, const Alpha& alpha, int precision_bits = kDefaultPrecisionBits);

// Coefficient functions a(t) with sup_{t in (0,1)} |a(t)| <= 1.
enum class Coefficient { kOne, kIdentity, kSquare, kReciprocalOnePlus };
Rational coefficient_value(Coefficient a, const Rational& t);
std::string to_string(Coefficient a);
Coefficient parse_coefficient(const std::string& name);

struct FamilySpec {
  Coefficient a = Coefficient::kIdentity;
  Rational r = 1;
  // Lower wall x > t pulled back to the chart domain, reparametrized affinely.
  bool wall = false;
};

// Charts t -> a(t) x^r ∘ P_alpha sharing abm_compose_cert((r), 1, alpha, M).
FamilyParam family_abm_charts(const FamilySpec& spec, std::vector<Rational> ts, const Alpha& alpha,
                              int precision_bits = kDefaultPrecisionBits);

nlohmann::json to_json(const Chart& chart);
nlohmann::json to_json(const CoverageReport& report);
nlohmann::json to_json(const UniformReport& report);
nlohmann::json to_json(const ProbeReport& report);

}  // namespace mildkit

#endif  // MILDKIT_PARAMETRIZE_H_
