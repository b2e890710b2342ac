#include "mildkit/oracle.h"

#include <algorithm>

namespace mildkit {
namespace {

int max_order(std::span<const MultiIndex> nus) {
  int m = 0;
  for (const MultiIndex& nu : nus) m = std::max(m, nu.order());
  return m;
}

std::size_t index_of(const std::vector<MultiIndex>& all, const MultiIndex& nu) {
  auto it = std::lower_bound(all.begin(), all.end(), nu);
  return static_cast<std::size_t>(it - all.begin());
}

// Sorted multi-indices below some requested nu: everything the chain and
// Leibniz rules touch.
std::vector<MultiIndex> downward_closure(std::span<const MultiIndex> nus, std::size_t arity) {
  std::vector<MultiIndex> out;
  for (const MultiIndex& cand : multi_indices_up_to(arity, max_order(nus))) {
    for (const MultiIndex& nu : nus) {
      if (cand.fits_in(nu)) {
        out.push_back(cand);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Integer binomial(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

}  // namespace

HPReal DerivativeOracle::value(const MultiIndex& nu, std::span<const Real> point) const {
  std::vector<MultiIndex> one{nu};
  return std::move(values(one, point).front());
}

AxisAffine AxisAffine::identity(int precision_bits) {
  return AxisAffine{Real(1L, precision_bits), Real(0L, precision_bits)};
}

ExpPolyOracle::ExpPolyOracle(ExpPoly p, int precision_bits, std::vector<AxisAffine> affine)
    : base_(std::move(p)), precision_bits_(precision_bits), affine_(std::move(affine)) {
  if (!affine_.empty() && affine_.size() != base_.arity()) {
    throw std::invalid_argument("affine pre-map count must equal arity");
  }
}

const ExpPoly& ExpPolyOracle::symbolic(const MultiIndex& nu) const {
  if (nu.size() != base_.arity()) throw std::invalid_argument("multi-index length must equal arity");
  if (nu.is_zero()) return base_;
  {
    std::lock_guard lock(mutex_);
    auto it = table_.find(nu);
    if (it != table_.end()) return *it->second;
  }
  std::size_t var = 0;
  while (nu[var] == 0) ++var;
  const ExpPoly& parent = symbolic(nu - MultiIndex::unit(nu.size(), var));
  auto fresh = std::make_unique<const ExpPoly>(differentiate(parent, var));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = table_.try_emplace(nu, std::move(fresh));
  return *it->second;
}

std::vector<HPReal> ExpPolyOracle::values(std::span<const MultiIndex> nus,
                                          std::span<const Real> point) const {
  if (point.size() != arity()) throw std::invalid_argument("point dimension must equal arity");
  std::vector<Real> u;
  u.reserve(point.size());
  const Real one(1L, precision_bits_);
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (affine_.empty()) {
      u.push_back(point[i]);
    } else {
      Real ui = affine_[i].offset + affine_[i].scale * point[i];
      if (ui > one) ui = one;  // rounding at t = 1
      u.push_back(std::move(ui));
    }
  }
  PointContext ctx(base_.alpha(), u, precision_bits_);
  std::vector<HPReal> out;
  out.reserve(nus.size());
  for (const MultiIndex& nu : nus) {
    HPReal v = ctx.evaluate(symbolic(nu));
    if (!affine_.empty()) {
      Real factor(1L, precision_bits_);
      for (std::size_t i = 0; i < nu.size(); ++i) {
        if (nu[i] > 0) factor *= pow(affine_[i].scale, static_cast<long>(nu[i]));
      }
      v.value *= factor;
      v.abs_error = v.abs_error * abs(factor) + abs(v.value) * ldexp_one(4 - precision_bits_, 64);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<HPReal> FunctionOracle::values(std::span<const MultiIndex> nus,
                                           std::span<const Real> point) const {
  std::vector<HPReal> out;
  out.reserve(nus.size());
  for (const MultiIndex& nu : nus) out.push_back(fn_(nu, point));
  return out;
}

ComposeOracle::ComposeOracle(UnivariateDerivative outer, OraclePtr inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {}

std::vector<HPReal> ComposeOracle::values(std::span<const MultiIndex> nus,
                                          std::span<const Real> point) const {
  const int bits = precision_bits();
  const std::vector<MultiIndex> all = downward_closure(nus, arity());
  const std::vector<HPReal> g = inner_->values(all, point);
  const Real& y = g[index_of(all, MultiIndex::zero(arity()))].value;

  std::vector<Real> outer_vals;
  for (int k = 0; k <= max_order(nus); ++k) outer_vals.push_back(outer_(k, y));

  std::vector<Real> g_abs, g_up;
  for (const HPReal& h : g) {
    g_abs.push_back(abs(h.value));
    g_up.push_back(h.magnitude_upper());
  }

  // One pass over p_s(nu, (k)) gives the value, the same sum with absolute
  // values, and with upper bounds; the error is the gap between the last two.
  std::vector<HPReal> out;
  for (const MultiIndex& nu : nus) {
    if (nu.is_zero()) {
      // F(g): first-order sensitivity |F'(y)| * err(g).
      Real v = outer_vals[0];
      Real err = abs(outer_vals.size() > 1 ? outer_vals[1] : outer_(1, y)) *
                     g[index_of(all, nu)].abs_error +
                 abs(v) * ldexp_one(16 - bits, 64);
      out.emplace_back(std::move(v), std::move(err), bits);
      continue;
    }
    Real v(0L, bits), lo(0L, bits), hi(0L, bits);
    for (int k = 1; k <= nu.order(); ++k) {
      const std::vector<PSTuple>& tuples = enumerate_ps(nu, MultiIndex({k}));
      if (tuples.empty()) continue;
      Real sv(0L, bits), sa(0L, bits), su(0L, bits);
      for (const PSTuple& t : tuples) {
        Real pv(t.coeff, bits);
        Real pa = pv, pu = pv;
        for (int j = 0; j < t.s; ++j) {
          const std::size_t idx = index_of(all, t.ls[j]);
          for (int rep = 0; rep < t.ks[j][0]; ++rep) {
            pv *= g[idx].value;
            pa *= g_abs[idx];
            pu *= g_up[idx];
          }
        }
        sv += pv;
        sa += pa;
        su += pu;
      }
      const Real outer_abs = abs(outer_vals[k]);
      sv *= outer_vals[k];
      sa *= outer_abs;
      su *= outer_abs;
      v += sv;
      lo += sa;
      hi += su;
    }
    Real err = (hi - lo) + hi * ldexp_one(16 - bits, 64);
    out.emplace_back(std::move(v), std::move(err), bits);
  }
  return out;
}

ProductOracle::ProductOracle(OraclePtr f, OraclePtr g) : f_(std::move(f)), g_(std::move(g)) {
  if (f_->arity() != g_->arity()) throw std::invalid_argument("product of oracles with different arity");
}

std::vector<HPReal> ProductOracle::values(std::span<const MultiIndex> nus,
                                          std::span<const Real> point) const {
  const int bits = precision_bits();
  const std::vector<MultiIndex> all = downward_closure(nus, arity());
  const std::vector<HPReal> fv = f_->values(all, point);
  const std::vector<HPReal> gv = g_->values(all, point);
  std::vector<HPReal> out;
  for (const MultiIndex& nu : nus) {
    Real sum(bits), err(bits);
    for (const MultiIndex& kappa : all) {
      if (!kappa.fits_in(nu)) continue;
      Integer c(1);
      for (std::size_t i = 0; i < nu.size(); ++i) c *= binomial(nu[i], kappa[i]);
      const HPReal& a = fv[index_of(all, kappa)];
      const HPReal& b = gv[index_of(all, nu - kappa)];
      Real cr(c, bits);
      Real term = cr * a.value * b.value;
      sum += term;
      err += cr * (abs(a.value) * b.abs_error + abs(b.value) * a.abs_error + a.abs_error * b.abs_error);
      err += abs(term) * ldexp_one(8 - bits, 64);
    }
    out.emplace_back(std::move(sum), std::move(err), bits);
  }
  return out;
}

OraclePtr constant_oracle(std::size_t arity, const Rational& c, int precision_bits) {
  std::vector<Rational> none;
  ExpPoly p = construct(BasicKind::kConstant, arity, 1, none, c);
  return std::make_shared<ExpPolyOracle>(std::move(p), precision_bits);
}

}  // namespace mildkit
