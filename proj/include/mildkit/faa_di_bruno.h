#ifndef MILDKIT_FAA_DI_BRUNO_H_
#define MILDKIT_FAA_DI_BRUNO_H_

#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "mildkit/real.h"

namespace mildkit {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex zero(std::size_t dim) { return MultiIndex(std::vector<int>(dim, 0)); }
  static MultiIndex unit(std::size_t dim, std::size_t i);

  std::size_t size() const { return entries_.size(); }
  int order() const { return order_; }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }
  bool is_zero() const { return order_ == 0; }

  // Componentwise <=.
  bool fits_in(const MultiIndex& other) const;
  // nu! = prod of componentwise factorials.
  Integer factorial() const;

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;
  MultiIndex operator*(int k) const;

  // Plain lexicographic order on entries, for use as a map key.
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.entries_ < b.entries_; }
  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<int> entries_;
  int order_ = 0;
};

// l ≺ l' iff |l| < |l'|, or |l| = |l'| and l is lexicographically before l'.
bool precedes(const MultiIndex& l, const MultiIndex& r);

// All multi-indices of the given dimension with order exactly n, and with
// order in [lo, hi], in ≺ order.
std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int n);
std::vector<MultiIndex> multi_indices_up_to(std::size_t dim, int max_order);

struct PartitionTerm {
  std::vector<int> k;  // k[i-1] = multiplicity of part i
  Integer coeff;       // n! / prod(k_i! (i!)^k_i)
  int k_total = 0;
};

struct PSTuple {
  int s = 0;
  std::vector<MultiIndex> ks;
  std::vector<MultiIndex> ls;
  Rational coeff;
};

Integer coefficient_of_partition(int n, const std::vector<int>& k);

// Memoized; the returned reference stays valid until clear_enumeration_caches().
const std::vector<PartitionTerm>& partitions_univariate(int n);
std::vector<PartitionTerm> build_partitions_univariate(int n);

const std::vector<PSTuple>& enumerate_ps(const MultiIndex& nu, const MultiIndex& lambda);
std::vector<PSTuple> build_ps(const MultiIndex& nu, const MultiIndex& lambda);

void clear_enumeration_caches();

nlohmann::json ps_to_json(const MultiIndex& nu, const MultiIndex& lambda,
                          const std::vector<PSTuple>& tuples);

// Derivative (f∘g)^(nu)(x) of a composition f: R^d -> R, g: R^e -> R^d.
//
//   outer(lambda)  returns f^(lambda)(g(x)) for 0 <= |lambda| <= |nu|
//   inner(c, l)    returns the l-th partial of the c-th component of g at x
//
// T is any commutative ring with + , * and multiplication by Rational
// (Rational, Real, ExpPoly). `zero` supplies the additive identity.
template <typename T, typename Outer, typename Inner>
T compose_derivative(const Outer& outer, const Inner& inner, const MultiIndex& nu,
                     std::size_t d, const T& zero) {
  if (nu.is_zero()) return outer(MultiIndex::zero(d));
  std::map<std::pair<std::size_t, MultiIndex>, T> inner_cache;
  auto inner_value = [&](std::size_t c, const MultiIndex& l) -> const T& {
    auto key = std::make_pair(c, l);
    auto it = inner_cache.find(key);
    if (it == inner_cache.end()) it = inner_cache.emplace(key, inner(c, l)).first;
    return it->second;
  };
  T total = zero;
  for (const MultiIndex& lambda : multi_indices_up_to(d, nu.order())) {
    if (lambda.is_zero()) continue;
    const std::vector<PSTuple>& tuples = enumerate_ps(nu, lambda);
    if (tuples.empty()) continue;
    T inner_sum = zero;
    for (const PSTuple& tup : tuples) {
      T product = zero;
      bool started = false;
      for (int j = 0; j < tup.s; ++j) {
        for (std::size_t c = 0; c < d; ++c) {
          for (int rep = 0; rep < tup.ks[j][c]; ++rep) {
            if (!started) {
              product = inner_value(c, tup.ls[j]);
              started = true;
            } else {
              product = product * inner_value(c, tup.ls[j]);
            }
          }
        }
      }
      inner_sum = inner_sum + product * tup.coeff;
    }
    total = total + outer(lambda) * inner_sum;
  }
  return total;
}

}  // namespace mildkit

#endif  // MILDKIT_FAA_DI_BRUNO_H_
