#include "mildkit/faa_di_bruno.h"

#include <algorithm>
#include <functional>
#include <mutex>
#include <numeric>
#include <shared_mutex>

namespace mildkit {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
    order_ += e;
  }
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t i) {
  std::vector<int> e(dim, 0);
  e.at(i) = 1;
  return MultiIndex(std::move(e));
}

bool MultiIndex::fits_in(const MultiIndex& other) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] > other.entries_[i]) return false;
  }
  return true;
}

Integer MultiIndex::factorial() const {
  Integer r(1);
  for (int e : entries_) r *= mildkit::factorial(static_cast<unsigned long>(e));
  return r;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  std::vector<int> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += o.entries_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  std::vector<int> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= o.entries_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator*(int k) const {
  std::vector<int> e(entries_);
  for (int& x : e) x *= k;
  return MultiIndex(std::move(e));
}

bool precedes(const MultiIndex& l, const MultiIndex& r) {
  if (l.order() != r.order()) return l.order() < r.order();
  return l.entries() < r.entries();
}

std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int n) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(dim, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == dim) {
      cur[i] = left;
      out.emplace_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[i] = v;
      rec(i + 1, left - v);
    }
  };
  if (dim == 0) return out;
  rec(0, n);
  return out;  // lexicographic within one order
}

std::vector<MultiIndex> multi_indices_up_to(std::size_t dim, int max_order) {
  std::vector<MultiIndex> out;
  for (int n = 0; n <= max_order; ++n) {
    auto level = multi_indices_of_order(dim, n);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

Integer coefficient_of_partition(int n, const std::vector<int>& k) {
  if (n < 1) throw std::invalid_argument("partition order must be positive");
  long weighted = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < 0) throw std::invalid_argument("partition multiplicities must be nonnegative");
    weighted += static_cast<long>(i + 1) * k[i];
  }
  if (weighted != n) throw std::invalid_argument("partition does not satisfy sum i*k_i = n");
  Integer den(1);
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) continue;
    Integer fi = factorial(i + 1);
    Integer pw;
    mpz_pow_ui(pw.get_mpz_t(), fi.get_mpz_t(), static_cast<unsigned long>(k[i]));
    den *= factorial(static_cast<unsigned long>(k[i])) * pw;
  }
  return factorial(static_cast<unsigned long>(n)) / den;
}

std::vector<PartitionTerm> build_partitions_univariate(int n) {
  if (n < 1) throw std::invalid_argument("partitions_univariate: n must be positive (empty sum)");
  std::vector<PartitionTerm> out;
  std::vector<int> k(static_cast<std::size_t>(n), 0);
  const Integer n_fact = factorial(static_cast<unsigned long>(n));
  std::vector<Integer> part_fact(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) part_fact[i] = factorial(static_cast<unsigned long>(i));
  // Largest part first; den accumulates prod k_i! (i!)^k_i.
  std::function<void(int, int, const Integer&, int)> rec = [&](int part, int left,
                                                               const Integer& den, int total) {
    if (left == 0) {
      out.push_back(PartitionTerm{k, n_fact / den, total});
      return;
    }
    if (part == 0) return;
    int max_mult = left / part;
    Integer d = den;
    for (int mult = 0; mult <= max_mult; ++mult) {
      if (mult > 0) d *= part_fact[part] * mult;
      k[part - 1] = mult;
      rec(part - 1, left - mult * part, d, total + mult);
    }
    k[part - 1] = 0;
  };
  rec(n, n, Integer(1), 0);
  return out;
}

namespace {

template <typename Key, typename Value>
class PublishOnceCache {
 public:
  template <typename Build>
  const Value& get(const Key& key, Build build) {
    {
      std::shared_lock lock(mutex_);
      auto it = entries_.find(key);
      if (it != entries_.end()) return *it->second;
    }
    auto fresh = std::make_unique<Value>(build());
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(key, std::move(fresh));
    return *it->second;
  }
  void clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
  }

 private:
  std::shared_mutex mutex_;
  std::map<Key, std::unique_ptr<const Value>> entries_;
};

PublishOnceCache<int, std::vector<PartitionTerm>>& partition_cache() {
  static PublishOnceCache<int, std::vector<PartitionTerm>> cache;
  return cache;
}

PublishOnceCache<std::pair<MultiIndex, MultiIndex>, std::vector<PSTuple>>& ps_cache() {
  static PublishOnceCache<std::pair<MultiIndex, MultiIndex>, std::vector<PSTuple>> cache;
  return cache;
}

// Nonzero l <= nu, sorted by ≺.
std::vector<MultiIndex> chain_candidates(const MultiIndex& nu) {
  std::vector<MultiIndex> out;
  for (int n = 1; n <= nu.order(); ++n) {
    for (MultiIndex& l : multi_indices_of_order(nu.size(), n)) {
      if (l.fits_in(nu)) out.push_back(std::move(l));
    }
  }
  return out;
}

}  // namespace

const std::vector<PartitionTerm>& partitions_univariate(int n) {
  if (n < 1) throw std::invalid_argument("partitions_univariate: n must be positive (empty sum)");
  return partition_cache().get(n, [n] { return build_partitions_univariate(n); });
}

std::vector<PSTuple> build_ps(const MultiIndex& nu, const MultiIndex& lambda) {
  std::vector<PSTuple> out;
  if (lambda.order() == 0 || lambda.order() > nu.order()) return out;
  const std::size_t d = lambda.size();
  const std::vector<MultiIndex> candidates = chain_candidates(nu);
  const Rational nu_fact(nu.factorial());

  std::vector<MultiIndex> ks, ls;
  std::vector<int> k(d, 0);

  std::function<void(std::size_t, const MultiIndex&, const MultiIndex&, const Rational&)> chain;

  // Chooses k <= lam_left with 1 <= |k| <= t_max for chain element l, then
  // continues the chain after position i.
  std::function<void(std::size_t, std::size_t, int, const MultiIndex&, const MultiIndex&,
                     const Rational&)>
      choose_k = [&](std::size_t i, std::size_t c, int room, const MultiIndex& nu_left,
                     const MultiIndex& lam_left, const Rational& coeff) {
        if (c == d) {
          int kt = std::accumulate(k.begin(), k.end(), 0);
          if (kt == 0) return;
          const MultiIndex& l = candidates[i];
          MultiIndex kk(k);
          Rational lf(l.factorial());
          Rational term_den = Rational(kk.factorial()) * rational_pow(lf, kt);
          ks.push_back(kk);
          ls.push_back(l);
          // The rest of the chain reuses `k`; restore this element's choice after.
          const std::vector<int> saved = k;
          chain(i + 1, nu_left - l * kt, lam_left - kk, coeff / term_den);
          k = saved;
          ks.pop_back();
          ls.pop_back();
          return;
        }
        for (int v = 0; v <= std::min(room, lam_left[c]); ++v) {
          k[c] = v;
          choose_k(i, c + 1, room - v, nu_left, lam_left, coeff);
        }
        k[c] = 0;
      };

  chain = [&](std::size_t start, const MultiIndex& nu_left, const MultiIndex& lam_left,
              const Rational& coeff) {
    if (lam_left.is_zero()) {
      if (nu_left.is_zero()) {
        Rational c = coeff;
        c.canonicalize();
        out.push_back(PSTuple{static_cast<int>(ls.size()), ks, ls, c});
      }
      return;
    }
    for (std::size_t i = start; i < candidates.size(); ++i) {
      const MultiIndex& l = candidates[i];
      // Every remaining unit of lambda consumes an l of order >= |l|.
      if (nu_left.order() < lam_left.order() * l.order()) break;
      if (!l.fits_in(nu_left)) continue;
      int t_max = lam_left.order();
      for (std::size_t c = 0; c < l.size(); ++c) {
        if (l[c] > 0) t_max = std::min(t_max, nu_left[c] / l[c]);
      }
      if (t_max == 0) continue;
      choose_k(i, 0, t_max, nu_left, lam_left, coeff);
    }
  };

  chain(0, nu, lambda, nu_fact);
  return out;
}

const std::vector<PSTuple>& enumerate_ps(const MultiIndex& nu, const MultiIndex& lambda) {
  return ps_cache().get({nu, lambda}, [&] { return build_ps(nu, lambda); });
}

void clear_enumeration_caches() {
  partition_cache().clear();
  ps_cache().clear();
}

nlohmann::json ps_to_json(const MultiIndex& nu, const MultiIndex& lambda,
                          const std::vector<PSTuple>& tuples) {
  nlohmann::json jt = nlohmann::json::array();
  for (const PSTuple& t : tuples) {
    nlohmann::json ks = nlohmann::json::array(), ls = nlohmann::json::array();
    for (const auto& k : t.ks) ks.push_back(k.entries());
    for (const auto& l : t.ls) ls.push_back(l.entries());
    jt.push_back({{"s", t.s}, {"ks", std::move(ks)}, {"ls", std::move(ls)}, {"coeff", to_string(t.coeff)}});
  }
  return {{"nu", nu.entries()}, {"lambda", lambda.entries()}, {"tuples", std::move(jt)}};
}

}  // namespace mildkit
