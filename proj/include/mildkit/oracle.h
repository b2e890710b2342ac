#ifndef MILDKIT_ORACLE_H_
#define MILDKIT_ORACLE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "mildkit/exp_poly.h"
#include "mildkit/faa_di_bruno.h"

namespace mildkit {

// Numeric derivative oracle on a subset of (0,1]^m: nu -> f^(nu)(t).
class DerivativeOracle {
 public:
  virtual ~DerivativeOracle() = default;
  virtual std::size_t arity() const = 0;
  virtual int precision_bits() const = 0;
  // Values of several partials at one point; implementations share work
  // across the requested indices.
  virtual std::vector<HPReal> values(std::span<const MultiIndex> nus,
                                     std::span<const Real> point) const = 0;

  HPReal value(const MultiIndex& nu, std::span<const Real> point) const;
};

using OraclePtr = std::shared_ptr<const DerivativeOracle>;

// u_i = offset_i + scale_i * t_i. Order-n derivatives in t pick up scale^n.
struct AxisAffine {
  Real scale;
  Real offset;
  static AxisAffine identity(int precision_bits);
};

// Exact derivative table of an ExpPoly, optionally behind per-axis affine
// pre-maps. Derivatives are built on demand and kept.
class ExpPolyOracle : public DerivativeOracle {
 public:
  explicit ExpPolyOracle(ExpPoly p, int precision_bits = kDefaultPrecisionBits,
                         std::vector<AxisAffine> affine = {});

  std::size_t arity() const override { return base_.arity(); }
  int precision_bits() const override { return precision_bits_; }
  std::vector<HPReal> values(std::span<const MultiIndex> nus,
                             std::span<const Real> point) const override;

  // nu-th partial in the pre-affine variables u.
  const ExpPoly& symbolic(const MultiIndex& nu) const;
  const ExpPoly& base() const { return base_; }
  const std::vector<AxisAffine>& affine() const { return affine_; }

 private:
  ExpPoly base_;
  int precision_bits_;
  std::vector<AxisAffine> affine_;
  mutable std::mutex mutex_;
  mutable std::map<MultiIndex, std::unique_ptr<const ExpPoly>> table_;
};

// Wraps a callable (nu, point) -> HPReal.
class FunctionOracle : public DerivativeOracle {
 public:
  using Fn = std::function<HPReal(const MultiIndex&, std::span<const Real>)>;
  FunctionOracle(std::size_t arity, int precision_bits, Fn fn)
      : arity_(arity), precision_bits_(precision_bits), fn_(std::move(fn)) {}

  std::size_t arity() const override { return arity_; }
  int precision_bits() const override { return precision_bits_; }
  std::vector<HPReal> values(std::span<const MultiIndex> nus,
                             std::span<const Real> point) const override;

 private:
  std::size_t arity_;
  int precision_bits_;
  Fn fn_;
};

// k-th derivative of a univariate outer function at y.
using UnivariateDerivative = std::function<Real(int k, const Real& y)>;

// (F ∘ g) for univariate F and scalar g, via the Faà di Bruno sum with
// numeric oracles.
class ComposeOracle : public DerivativeOracle {
 public:
  ComposeOracle(UnivariateDerivative outer, OraclePtr inner);

  std::size_t arity() const override { return inner_->arity(); }
  int precision_bits() const override { return inner_->precision_bits(); }
  std::vector<HPReal> values(std::span<const MultiIndex> nus,
                             std::span<const Real> point) const override;

 private:
  UnivariateDerivative outer_;
  OraclePtr inner_;
};

// f * g via the Leibniz rule.
class ProductOracle : public DerivativeOracle {
 public:
  ProductOracle(OraclePtr f, OraclePtr g);

  std::size_t arity() const override { return f_->arity(); }
  int precision_bits() const override { return f_->precision_bits(); }
  std::vector<HPReal> values(std::span<const MultiIndex> nus,
                             std::span<const Real> point) const override;

 private:
  OraclePtr f_;
  OraclePtr g_;
};

// Constant function on (0,1]^m.
OraclePtr constant_oracle(std::size_t arity, const Rational& c,
                          int precision_bits = kDefaultPrecisionBits);

}  // namespace mildkit

#endif  // MILDKIT_ORACLE_H_
