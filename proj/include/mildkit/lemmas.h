#ifndef MILDKIT_LEMMAS_H_
#define MILDKIT_LEMMAS_H_

#include <vector>

#include "json.hpp"
#include "mildkit/exp_poly.h"

namespace mildkit {

// x^(alpha+k) |u_alpha^(k)(x)| equals the rising factorial
// alpha (alpha+1) ... (alpha+k-1); it is compared against alpha^k k!
// (alpha >= 1) or k! (alpha < 1).
struct UmildRow {
  int k = 0;
  Rational rising;
  Rational bound;
  bool holds = false;
  bool tight = false;
  // The weighted derivative reduced to a constant ExpPoly with |coeff| = rising.
  bool constant_in_x = false;
};

struct UmildReport {
  Rational alpha;
  std::vector<UmildRow> rows;
  bool pass = true;
};

UmildReport check_umild(const Alpha& alpha, int k_max);

// max_{x>0} x^(-r) exp(-s x^(-alpha)) = (r / (e s alpha))^(r/alpha), attained
// at x = (s alpha / r)^(1/alpha); compared with golden-section search.
struct ExpmildReport {
  Rational r, s, alpha;
  Real closed_form;
  Real closed_argmax;
  Real numeric_max;
  Real numeric_argmax;
  Real relative_difference;
  bool pass = false;
};

inline constexpr double kExpmildTolerance = 1e-10;

ExpmildReport check_expmild(const Rational& r, const Rational& s, const Alpha& alpha,
                            int precision_bits = kDefaultPrecisionBits);

// (psi∘phi)^(n)(0) via the Faà di Bruno sum with exact oracles
//   psi^(k)(B_g) = B_f A_f^k k!,  phi^(k)(0) = B_g A_g^k k!,
// against (A_f B_f B_g / (1 + A_f B_g)) (A_g (1 + A_f B_g))^n n!.
struct GfRow {
  int n = 0;
  Rational via_chain_rule;
  Rational closed_form;
  bool equal = false;
};

struct GfReport {
  Rational A_f, B_f, A_g, B_g;
  std::vector<GfRow> rows;
  bool pass = true;
};

GfReport gf_check(const Rational& A_f, const Rational& B_f, const Rational& A_g,
                  const Rational& B_g, int n_max);

nlohmann::json to_json(const UmildReport& r);
nlohmann::json to_json(const ExpmildReport& r);
nlohmann::json to_json(const GfReport& r);

}  // namespace mildkit

#endif  // MILDKIT_LEMMAS_H_
