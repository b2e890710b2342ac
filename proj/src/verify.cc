#include "mildkit/verify.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mildkit {
namespace {

struct Objective {
  Real g;
  Real err;
  std::vector<Real> dg;  // partials of g along each axis

  Real upper() const { return abs(g) + err; }
};

// Indices needed to evaluate g = w f^(nu) and its first partials.
std::vector<MultiIndex> objective_indices(const MultiIndex& nu) {
  std::vector<MultiIndex> out{nu};
  for (std::size_t i = 0; i < nu.size(); ++i) out.push_back(nu + MultiIndex::unit(nu.size(), i));
  return out;
}

// values[k] must correspond to objective_indices(nu)[k].
Objective make_objective(const MultiIndex& nu, bool weighted, std::span<const Real> point,
                         const HPReal* values, int bits) {
  Objective o{Real(bits), Real(bits), {}};
  Real w(1L, bits);
  if (weighted) {
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (nu[i] > 0) w *= pow(point[i], static_cast<long>(nu[i]));
    }
  }
  o.g = w * values[0].value;
  o.err = w * values[0].abs_error;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    Real d = w * values[1 + i].value;
    if (weighted && nu[i] > 0) {
      d += Real(static_cast<long>(nu[i]), bits) * (w / point[i]) * values[0].value;
    }
    o.dg.push_back(std::move(d));
  }
  return o;
}

class SupSearch {
 public:
  SupSearch(const DerivativeOracle& oracle, const MultiIndex& nu, bool weighted,
            const std::vector<Real>& axis, const GridSpec& grid)
      : oracle_(oracle), nu_(nu), weighted_(weighted), axis_(axis), grid_(grid),
        bits_(oracle.precision_bits()), indices_(objective_indices(nu)),
        best_(Real(bits_)) {}

  Objective eval(std::span<const Real> point) {
    std::vector<HPReal> vals = oracle_.values(indices_, point);
    Objective o = make_objective(nu_, weighted_, point, vals.data(), bits_);
    consider(o, point);
    return o;
  }

  void consider(const Objective& o, std::span<const Real> point) {
    Real up = o.upper();
    if (!have_best_ || best_ < up) {
      best_ = up;
      witness_.assign(point.begin(), point.end());
      exhausted_ = o.err > abs(o.g) * ldexp_one(-32, 64) && !o.g.is_zero();
      have_best_ = true;
    }
  }

  // Coordinate-wise ascent of |g| from `start`, bisecting on sign changes of
  // the partial along each axis.
  void refine(std::vector<Real> q) {
    const std::size_t m = q.size();
    const int rounds = (m == 1) ? 1 : grid_.refine_rounds;
    Objective cur = eval(q);
    for (int r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < m; ++i) {
        const int s = cur.g.sign();
        if (s == 0) break;
        const int slope = s * cur.dg[i].sign();
        if (slope == 0) continue;
        auto next = neighbor(q[i], slope > 0);
        if (!next) continue;
        std::vector<Real> q2 = q;
        q2[i] = *next;
        Objective other = eval(q2);
        const int slope2 = s * other.dg[i].sign();
        if (slope2 == slope) {
          if (abs(cur.g) < abs(other.g)) {
            q = std::move(q2);
            cur = std::move(other);
          }
          continue;
        }
        // Root of s * dg_i between q[i] and next.
        Real a = q[i], b = *next;
        for (int it = 0; it < grid_.refine_iterations; ++it) {
          std::vector<Real> mid = q;
          mid[i] = (a + b) * Rational(1, 2);
          Objective om = eval(mid);
          if (s * om.dg[i].sign() == slope) {
            a = mid[i];
          } else {
            b = mid[i];
          }
        }
        std::vector<Real> qa = q;
        qa[i] = a;
        Objective oa = eval(qa);
        if (abs(cur.g) < abs(oa.g)) {
          q = std::move(qa);
          cur = std::move(oa);
        }
      }
    }
  }

  // Bisects for the zero of the axis-i partial between a and b, where the
  // partial has sign `sign_a` at a and the opposite sign at b.
  void bisect(std::vector<Real> q, std::size_t i, Real a, Real b, int sign_a) {
    for (int it = 0; it < grid_.refine_iterations; ++it) {
      q[i] = (a + b) * Rational(1, 2);
      Objective om = eval(q);
      if (om.dg[i].sign() == sign_a) {
        a = q[i];
      } else {
        b = q[i];
      }
    }
    q[i] = a;
    eval(q);
    q[i] = b;
    eval(q);
  }

  SupEstimate result() const {
    return SupEstimate{nu_, best_, witness_, exhausted_};
  }

 private:
  std::optional<Real> neighbor(const Real& x, bool up) const {
    if (up) {
      auto it = std::upper_bound(axis_.begin(), axis_.end(), x);
      if (it == axis_.end()) return std::nullopt;
      return *it;
    }
    auto it = std::lower_bound(axis_.begin(), axis_.end(), x);
    if (it == axis_.begin()) return std::nullopt;
    return *(it - 1);
  }

  const DerivativeOracle& oracle_;
  MultiIndex nu_;
  bool weighted_;
  const std::vector<Real>& axis_;
  const GridSpec& grid_;
  int bits_;
  std::vector<MultiIndex> indices_;
  Real best_;
  std::vector<Real> witness_;
  bool have_best_ = false;
  bool exhausted_ = false;
};

}  // namespace

std::vector<Real> axis_grid(std::size_t count, int floor_log2, int precision_bits) {
  if (count < 4) throw std::invalid_argument("grid needs at least 4 points per axis");
  const std::size_t geometric = count / 2;
  const std::size_t uniform = count - geometric;
  std::vector<Real> out;
  for (std::size_t i = 0; i < geometric; ++i) {
    // 2^(floor * (1 - i/(geometric-1)))
    Rational e = Rational(floor_log2) * (1 - Rational(static_cast<long>(i), static_cast<long>(geometric - 1)));
    Real two(2L, precision_bits);
    out.push_back(pow(two, Real(e, precision_bits)));
  }
  for (std::size_t j = 0; j < uniform; ++j) {
    Rational t = Rational(1, 4) + Rational(3, 4) * Rational(static_cast<long>(j), static_cast<long>(uniform - 1));
    out.emplace_back(t, precision_bits);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SupEstimate> estimate_sups(const DerivativeOracle& oracle,
                                       const std::vector<MultiIndex>& nus, bool weighted,
                                       const GridSpec& grid) {
  const std::size_t m = oracle.arity();
  const int bits = oracle.precision_bits();
  const std::vector<Real> axis =
      axis_grid(m == 1 ? grid.points : grid.points_per_axis, grid.floor_log2, bits);
  const std::size_t n_axis = axis.size();

  // Everything any objective needs, evaluated once per grid point.
  std::vector<MultiIndex> all;
  for (const MultiIndex& nu : nus) {
    for (MultiIndex& k : objective_indices(nu)) all.push_back(std::move(k));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto slot = [&](const MultiIndex& nu) {
    return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), nu) - all.begin());
  };

  std::size_t n_points = 1;
  for (std::size_t i = 0; i < m; ++i) n_points *= n_axis;
  auto coords = [&](std::size_t p) {
    std::vector<std::size_t> c(m);
    for (std::size_t i = 0; i < m; ++i) {
      c[i] = p % n_axis;
      p /= n_axis;
    }
    return c;
  };
  auto point_of = [&](const std::vector<std::size_t>& c) {
    std::vector<Real> pt;
    for (std::size_t i = 0; i < m; ++i) pt.push_back(axis[c[i]]);
    return pt;
  };

  std::vector<std::vector<HPReal>> table(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    table[p] = oracle.values(all, point_of(coords(p)));
  }

  std::vector<SupEstimate> out;
  for (const MultiIndex& nu : nus) {
    const std::vector<MultiIndex> idx = objective_indices(nu);
    std::vector<std::size_t> slots;
    for (const auto& k : idx) slots.push_back(slot(k));

    SupSearch search(oracle, nu, weighted, axis, grid);
    std::vector<Real> mags;
    std::vector<int> slopes;
    mags.reserve(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
      std::vector<HPReal> vals;
      for (std::size_t s : slots) vals.push_back(table[p][s]);
      std::vector<Real> pt = point_of(coords(p));
      Objective o = make_objective(nu, weighted, pt, vals.data(), bits);
      search.consider(o, pt);
      mags.push_back(abs(o.g));
      slopes.push_back(o.dg[0].sign());
    }
    Real grid_max(bits);
    for (const Real& v : mags) grid_max = max(grid_max, v);

    if (m == 1) {
      // Every critical point bracketed by the grid, not only the tallest
      // sampled lobes: high derivatives oscillate with lobes of similar height.
      // Cells near the top are subdivided first, so a lobe hiding between
      // two samples with equal slopes is still bracketed.
      const Real threshold = grid_max * Real(grid.subdivide_fraction, 64);
      for (std::size_t p = 0; p + 1 < n_points; ++p) {
        std::vector<Real> xs{axis[p]};
        std::vector<int> ss{slopes[p]};
        if (!grid_max.is_zero() && grid.subdivisions > 1 && max(mags[p], mags[p + 1]) >= threshold) {
          const Real step = (axis[p + 1] - axis[p]) * Rational(1, static_cast<long>(grid.subdivisions));
          for (std::size_t k = 1; k < grid.subdivisions; ++k) {
            std::vector<Real> q{axis[p] + step * Rational(static_cast<long>(k))};
            ss.push_back(search.eval(q).dg[0].sign());
            xs.push_back(std::move(q[0]));
          }
        }
        xs.push_back(axis[p + 1]);
        ss.push_back(slopes[p + 1]);
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
          if (ss[k] != 0 && ss[k + 1] != 0 && ss[k] != ss[k + 1]) search.bisect({xs[k]}, 0, xs[k], xs[k + 1], ss[k]);
        }
      }
      out.push_back(search.result());
      continue;
    }

    // Seeds: grid local maxima of |g| close to the grid max.
    std::vector<std::size_t> seeds;
    if (!grid_max.is_zero()) {
      Real threshold = grid_max * Real(grid.refine_fraction, 64);
      for (std::size_t p = 0; p < n_points; ++p) {
        if (mags[p] < threshold) continue;
        auto c = coords(p);
        bool local_max = true;
        std::size_t stride = 1;
        for (std::size_t i = 0; i < m && local_max; ++i) {
          if (c[i] > 0 && mags[p] < mags[p - stride]) local_max = false;
          if (c[i] + 1 < n_axis && mags[p] < mags[p + stride]) local_max = false;
          stride *= n_axis;
        }
        if (local_max) seeds.push_back(p);
      }
      std::stable_sort(seeds.begin(), seeds.end(),
                       [&](std::size_t a, std::size_t b) { return mags[b] < mags[a]; });
      if (seeds.size() > grid.max_refine_seeds) seeds.resize(grid.max_refine_seeds);
    }
    for (std::size_t p : seeds) search.refine(point_of(coords(p)));
    out.push_back(search.result());
  }
  return out;
}

const OrderRecord* BoundReport::worst() const {
  const OrderRecord* w = nullptr;
  for (const OrderRecord& r : orders) {
    if (!w || r.margin < w->margin) w = &r;
  }
  return w;
}

BoundReport verify_cert(const DerivativeOracle& oracle, const MildCert& cert, int n_max,
                        const GridSpec& grid) {
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  const int bits = oracle.precision_bits();
  std::vector<MultiIndex> nus = multi_indices_up_to(oracle.arity(), n_max);
  std::vector<SupEstimate> sups =
      estimate_sups(oracle, nus, cert.kind == CertKind::kWeaklyMild, grid);
  BoundReport report;
  report.cert = cert;
  report.precision_bits = bits;
  for (SupEstimate& s : sups) {
    OrderRecord rec{s.nu, std::move(s.sup), cert.bound(s.nu.order(), bits), Real(bits),
                    std::move(s.witness), s.precision_exhausted};
    rec.margin = rec.bound - rec.sup;
    // Exactly attained bounds (sup P_alpha = 1 at x = 1) differ only by the
    // evaluation error folded into sup.
    const Real tie = rec.bound * ldexp_one(static_cast<long>(kTieRelativeLog2 - bits), bits);
    if (rec.margin < -tie) report.pass = false;
    report.orders.push_back(std::move(rec));
  }
  return report;
}

MildCert FitResult::as_cert() const {
  return make_cert(Constant::numeric(A_fitted), Constant::numeric(B_fitted), C_assumed);
}

FitResult fit_constants(const DerivativeOracle& oracle, const Rational& C, int n_max,
                        const GridSpec& grid) {
  if (oracle.arity() != 1) throw std::invalid_argument("fit_constants expects a univariate oracle");
  if (n_max < 1) throw std::invalid_argument("fit_constants needs n_max >= 1");
  const int bits = oracle.precision_bits();
  std::vector<MultiIndex> nus;
  for (int n = 0; n <= n_max; ++n) nus.emplace_back(std::vector<int>{n});
  std::vector<SupEstimate> sups = estimate_sups(oracle, nus, false, grid);

  FitResult fit{C, max(Real(1L, bits), sups[0].sup), Real(bits), n_max};
  const Rational c_plus_one = C + 1;
  for (int n = 1; n <= n_max; ++n) {
    if (sups[n].sup.is_zero()) continue;
    Real denom = fit.B_fitted * pow(factorial_real(static_cast<unsigned long>(n), bits), c_plus_one);
    Real candidate = pow(sups[n].sup / denom, Rational(1, n));
    fit.A_fitted = max(fit.A_fitted, candidate);
  }
  // Round the root up so the fitted certificate re-verifies on the same grid.
  if (!fit.A_fitted.is_zero()) fit.A_fitted *= Real(1L, bits) + ldexp_one(24 - bits, 64);
  return fit;
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json orders = nlohmann::json::array();
  for (const OrderRecord& r : report.orders) {
    nlohmann::json witness = nlohmann::json::array();
    for (const Real& w : r.witness) witness.push_back(w.to_string(20));
    nlohmann::json o = {{"nu", r.nu.entries()},
                        {"sup", r.sup.to_string(20)},
                        {"bound", r.bound.to_string(20)},
                        {"margin", r.margin.to_string(20)},
                        {"witness", std::move(witness)}};
    if (r.precision_exhausted) o["precision_exhausted"] = true;
    orders.push_back(std::move(o));
  }
  return {{"cert", to_json(report.cert)},
          {"precision_bits", report.precision_bits},
          {"orders", std::move(orders)},
          {"pass", report.pass}};
}

nlohmann::json to_json(const FitResult& fit) {
  return {{"C_assumed", to_string(fit.C_assumed)},
          {"A_fitted", fit.A_fitted.to_string(20)},
          {"B_fitted", fit.B_fitted.to_string(20)},
          {"n_max", fit.n_max}};
}

}  // namespace mildkit
