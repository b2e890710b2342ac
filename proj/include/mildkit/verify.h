#ifndef MILDKIT_VERIFY_H_
#define MILDKIT_VERIFY_H_

#include <optional>
#include <vector>

#include "json.hpp"
#include "mildkit/cert.h"
#include "mildkit/oracle.h"

namespace mildkit {

// Sampling plan for supremum estimation on (0,1]^m. Each axis gets half its
// points geometric in (2^floor_log2, 1] and half uniform in [1/4, 1].
struct GridSpec {
  std::size_t points = 512;
  std::size_t points_per_axis = 64;
  int floor_log2 = -40;
  int refine_iterations = 40;
  int refine_rounds = 3;
  // Grid local maxima within this fraction of the grid max are refined.
  double refine_fraction = 0.5;
  std::size_t max_refine_seeds = 16;
  // Univariate: cells with an endpoint within this fraction of the grid max
  // are split into `subdivisions` pieces before bracketing critical points.
  double subdivide_fraction = 0.25;
  std::size_t subdivisions = 4;
};

std::vector<Real> axis_grid(std::size_t count, int floor_log2, int precision_bits);

struct SupEstimate {
  MultiIndex nu;
  Real sup;                    // includes the evaluation error bound
  std::vector<Real> witness;
  bool precision_exhausted = false;
};

// sup over the grid of |f^(nu)| (times x^nu when weighted), refined by
// bisection: on univariate grids at every sign change of the objective's
// derivative, on cubes by coordinate ascent from the tallest grid maxima.
std::vector<SupEstimate> estimate_sups(const DerivativeOracle& oracle,
                                       const std::vector<MultiIndex>& nus, bool weighted,
                                       const GridSpec& grid);

struct OrderRecord {
  MultiIndex nu;
  Real sup;
  Real bound;
  Real margin;
  std::vector<Real> witness;
  bool precision_exhausted = false;
};

struct BoundReport {
  MildCert cert;
  std::vector<OrderRecord> orders;
  bool pass = true;
  int precision_bits = kDefaultPrecisionBits;

  const OrderRecord* worst() const;
};

// Margins down to -bound * 2^(kTieRelativeLog2 - precision_bits) count as
// ties: the sup carries the evaluation error bound, so a bound attained
// exactly would otherwise fail by a few ulps.
inline constexpr int kTieRelativeLog2 = 16;

// Checks the certificate at every nu with |nu| <= n_max.
BoundReport verify_cert(const DerivativeOracle& oracle, const MildCert& cert, int n_max,
                        const GridSpec& grid = {});

struct FitResult {
  Rational C_assumed;
  Real B_fitted;
  Real A_fitted;
  int n_max = 0;

  MildCert as_cert() const;
};

// B = max(1, sup_0); A = max_{1<=n<=n_max} (sup_n / (B (n!)^(C+1)))^(1/n).
// Univariate oracles only.
FitResult fit_constants(const DerivativeOracle& oracle, const Rational& C, int n_max,
                        const GridSpec& grid = {});

nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const FitResult& fit);

}  // namespace mildkit

#endif  // MILDKIT_VERIFY_H_
