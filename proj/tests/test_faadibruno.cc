#include <algorithm>
#include <chrono>
#include <thread>

#include <gtest/gtest.h>

#include "mildkit/exp_poly.h"
#include "mildkit/faa_di_bruno.h"

namespace mildkit {
namespace {

// Bell numbers by B(n+1) = sum_k binom(n,k) B(k).
std::vector<Integer> bell_numbers(int n_max) {
  std::vector<Integer> bell{Integer(1)};
  for (int n = 0; n < n_max; ++n) {
    Integer next = 0;
    for (int k = 0; k <= n; ++k) {
      Integer binom;
      mpz_bin_uiui(binom.get_mpz_t(), n, k);
      next += binom * bell[k];
    }
    bell.push_back(next);
  }
  return bell;
}

// Partition numbers by Euler's pentagonal recurrence.
std::vector<long> partition_numbers(int n_max) {
  std::vector<long> p(n_max + 1, 0);
  p[0] = 1;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 1;; ++k) {
      int g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
      if (g1 > n) break;
      long sign = (k % 2) ? 1 : -1;
      p[n] += sign * p[n - g1];
      if (g2 <= n) p[n] += sign * p[n - g2];
    }
  }
  return p;
}

TEST(MultiIndex, PrecedesIsOrderThenLex) {
  EXPECT_TRUE(precedes(MultiIndex({0, 1}), MultiIndex({1, 0})));
  EXPECT_TRUE(precedes(MultiIndex({1, 0}), MultiIndex({0, 2})));
  EXPECT_FALSE(precedes(MultiIndex({0, 2}), MultiIndex({1, 0})));
  EXPECT_FALSE(precedes(MultiIndex({1, 1}), MultiIndex({1, 1})));
  EXPECT_TRUE(precedes(MultiIndex({0, 0}), MultiIndex({0, 1})));
}

TEST(MultiIndex, Arithmetic) {
  MultiIndex a({1, 2}), b({0, 1});
  EXPECT_EQ(a.order(), 3);
  EXPECT_EQ(a + b, MultiIndex({1, 3}));
  EXPECT_EQ(a - b, MultiIndex({1, 1}));
  EXPECT_EQ(b * 3, MultiIndex({0, 3}));
  EXPECT_TRUE(b.fits_in(a));
  EXPECT_FALSE(a.fits_in(b));
  EXPECT_EQ(a.factorial(), 2);
  EXPECT_THROW(MultiIndex({-1}), std::invalid_argument);
}

TEST(Partitions, CoefficientExamples) {
  EXPECT_EQ(coefficient_of_partition(3, {1, 1, 0}), 3);
  EXPECT_EQ(coefficient_of_partition(3, {3, 0, 0}), 1);
  EXPECT_EQ(coefficient_of_partition(5, {1, 2, 0, 0, 0}), 15);
  EXPECT_EQ(coefficient_of_partition(4, {2, 1, 0, 0}), 6);
  EXPECT_THROW(coefficient_of_partition(4, {1, 1, 0, 0}), std::invalid_argument);
}

TEST(Partitions, FourHasFiveTermsSummingToBell) {
  const auto& terms = partitions_univariate(4);
  EXPECT_EQ(terms.size(), 5u);
  Integer sum = 0;
  for (const auto& t : terms) sum += t.coeff;
  EXPECT_EQ(sum, 15);
  auto it = std::find_if(terms.begin(), terms.end(),
                         [](const PartitionTerm& t) { return t.k == std::vector<int>{2, 1, 0, 0}; });
  ASSERT_NE(it, terms.end());
  EXPECT_EQ(it->coeff, 6);
  EXPECT_EQ(it->k_total, 3);
}

TEST(Partitions, BellNumbersUpTo15) {
  auto bell = bell_numbers(15);
  for (int n = 1; n <= 15; ++n) {
    Integer sum = 0;
    for (const auto& t : partitions_univariate(n)) {
      int weighted = 0, total = 0;
      for (std::size_t i = 0; i < t.k.size(); ++i) {
        weighted += static_cast<int>(i + 1) * t.k[i];
        total += t.k[i];
      }
      EXPECT_EQ(weighted, n);
      EXPECT_EQ(total, t.k_total);
      EXPECT_EQ(t.coeff, coefficient_of_partition(n, t.k));
      sum += t.coeff;
    }
    EXPECT_EQ(sum, bell[n]) << "n=" << n;
  }
}

TEST(Partitions, CountsMatchPartitionNumbers) {
  auto p = partition_numbers(40);
  for (int n = 1; n <= 40; ++n) EXPECT_EQ(static_cast<long>(partitions_univariate(n).size()), p[n]) << n;
  EXPECT_EQ(p[40], 37338);
}

TEST(Partitions, ZeroIsAnError) { EXPECT_THROW(partitions_univariate(0), std::invalid_argument); }

TEST(Partitions, MemoizedReferenceIsStable) {
  const auto* first = &partitions_univariate(9);
  EXPECT_EQ(first, &partitions_univariate(9));
}

TEST(EnumeratePs, UnivariateNu4Lambda2) {
  // k_total = 2 partitions of 4: {1,3} with 4!/(1! 3!) = 4 and {2,2} with 4!/(2! 2!^2) = 3.
  const auto& tuples = enumerate_ps(MultiIndex({4}), MultiIndex({2}));
  ASSERT_EQ(tuples.size(), 2u);
  std::vector<std::pair<std::vector<int>, Rational>> seen;
  for (const PSTuple& t : tuples) {
    std::vector<int> parts;
    for (int j = 0; j < t.s; ++j) {
      for (int r = 0; r < t.ks[j][0]; ++r) parts.push_back(t.ls[j][0]);
    }
    seen.emplace_back(parts, t.coeff);
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(seen[0].first, (std::vector<int>{1, 3}));
  EXPECT_EQ(seen[0].second, 4);
  EXPECT_EQ(seen[1].first, (std::vector<int>{2, 2}));
  EXPECT_EQ(seen[1].second, 3);
}

TEST(EnumeratePs, MixedFirstOrder) {
  const auto& one = enumerate_ps(MultiIndex({1, 1}), MultiIndex({1}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].s, 1);
  EXPECT_EQ(one[0].ls[0], MultiIndex({1, 1}));
  EXPECT_EQ(one[0].ks[0], MultiIndex({1}));
  EXPECT_EQ(one[0].coeff, 1);

  const auto& two = enumerate_ps(MultiIndex({1, 1}), MultiIndex({2}));
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].s, 2);
  EXPECT_EQ(two[0].ls[0], MultiIndex({0, 1}));
  EXPECT_EQ(two[0].ls[1], MultiIndex({1, 0}));
  EXPECT_EQ(two[0].coeff, 1);
}

TEST(EnumeratePs, EmptyOutsideRange) {
  EXPECT_TRUE(enumerate_ps(MultiIndex({2}), MultiIndex({0})).empty());
  EXPECT_TRUE(enumerate_ps(MultiIndex({2}), MultiIndex({3})).empty());
}

TEST(EnumeratePs, InvariantsUpToOrderEight) {
  std::size_t checked = 0;
  for (std::size_t e = 1; e <= 3; ++e) {
    for (std::size_t d = 1; d <= 2; ++d) {
      for (const MultiIndex& nu : multi_indices_up_to(e, 8)) {
        if (nu.is_zero()) continue;
        for (const MultiIndex& lambda : multi_indices_up_to(d, nu.order())) {
          if (lambda.is_zero()) continue;
          for (const PSTuple& t : build_ps(nu, lambda)) {
            MultiIndex ksum = MultiIndex::zero(d), lsum = MultiIndex::zero(e);
            ASSERT_EQ(static_cast<int>(t.ks.size()), t.s);
            ASSERT_EQ(static_cast<int>(t.ls.size()), t.s);
            for (int j = 0; j < t.s; ++j) {
              EXPECT_GT(t.ks[j].order(), 0);
              EXPECT_FALSE(t.ls[j].is_zero());
              if (j > 0) EXPECT_TRUE(precedes(t.ls[j - 1], t.ls[j]));
              ksum = ksum + t.ks[j];
              lsum = lsum + t.ls[j] * t.ks[j].order();
            }
            EXPECT_EQ(ksum, lambda);
            EXPECT_EQ(lsum, nu);
            EXPECT_GT(t.coeff, 0);
            ++checked;
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 10000u);
}

// Coefficients count the set partitions of |nu| labelled items into |lambda|
// blocks whose labels form the multiset lambda: S(n, k) k! / lambda!.
TEST(EnumeratePs, CoefficientSumsCountLabelledSetPartitions) {
  constexpr int kMax = 8;
  std::vector<std::vector<Integer>> stirling(kMax + 1, std::vector<Integer>(kMax + 1, 0));
  stirling[0][0] = 1;
  for (int n = 1; n <= kMax; ++n) {
    for (int k = 1; k <= n; ++k) stirling[n][k] = k * stirling[n - 1][k] + stirling[n - 1][k - 1];
  }
  for (std::size_t e = 1; e <= 3; ++e) {
    for (std::size_t d = 1; d <= 3; ++d) {
      for (const MultiIndex& nu : multi_indices_up_to(e, kMax)) {
        if (nu.is_zero()) continue;
        for (const MultiIndex& lambda : multi_indices_up_to(d, nu.order())) {
          if (lambda.is_zero()) continue;
          const std::vector<PSTuple> tuples = build_ps(nu, lambda);
          Rational sum = 0;
          for (std::size_t i = 0; i < tuples.size(); ++i) {
            sum += tuples[i].coeff;
            for (std::size_t j = 0; j < i; ++j) {
              EXPECT_FALSE(tuples[i].ks == tuples[j].ks && tuples[i].ls == tuples[j].ls) << "duplicate tuple";
            }
          }
          const int k = lambda.order();
          Rational expected(stirling[nu.order()][k] * factorial(static_cast<unsigned long>(k)));
          expected /= Rational(lambda.factorial());
          EXPECT_EQ(sum, expected) << "|nu|=" << nu.order() << " e=" << e << " d=" << d;
        }
      }
    }
  }
}

TEST(EnumeratePs, SpecializesToUnivariatePartitions) {
  for (int n = 1; n <= 12; ++n) {
    for (int k = 1; k <= n; ++k) {
      std::vector<Rational> from_ps, from_partitions;
      for (const PSTuple& t : enumerate_ps(MultiIndex({n}), MultiIndex({k}))) from_ps.push_back(t.coeff);
      for (const PartitionTerm& t : partitions_univariate(n)) {
        if (t.k_total == k) from_partitions.push_back(Rational(t.coeff));
      }
      std::sort(from_ps.begin(), from_ps.end());
      std::sort(from_partitions.begin(), from_partitions.end());
      EXPECT_EQ(from_ps, from_partitions) << "n=" << n << " k=" << k;
    }
  }
}

TEST(EnumeratePs, JsonSchema) {
  nlohmann::json j = ps_to_json(MultiIndex({1, 1}), MultiIndex({2}), enumerate_ps(MultiIndex({1, 1}), MultiIndex({2})));
  EXPECT_EQ(j["nu"], nlohmann::json({1, 1}));
  EXPECT_EQ(j["lambda"], nlohmann::json({2}));
  ASSERT_EQ(j["tuples"].size(), 1u);
  EXPECT_EQ(j["tuples"][0]["s"], 2);
  EXPECT_EQ(j["tuples"][0]["coeff"], "1/1");
}

TEST(EnumeratePs, ConcurrentQueriesAgree) {
  clear_enumeration_caches();
  const MultiIndex nu({4, 3}), lambda({3});
  std::vector<std::size_t> sizes(4);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    threads.emplace_back([&, i] { sizes[i] = enumerate_ps(nu, lambda).size(); });
  }
  for (auto& t : threads) t.join();
  for (std::size_t s : sizes) EXPECT_EQ(s, build_ps(nu, lambda).size());
}

TEST(EnumeratePs, OrderTwelveTwoVariablesUnderOneSecond) {
  clear_enumeration_caches();
  auto t0 = std::chrono::steady_clock::now();
  std::size_t count = 0;
  for (const MultiIndex& nu : multi_indices_of_order(2, 12)) {
    for (int k = 1; k <= 12; ++k) count += enumerate_ps(nu, MultiIndex({k})).size();
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GT(count, 0u);
  EXPECT_LT(seconds, 1.0);
}

// Rational oracles for identity composition: f = g = id.
TEST(ComposeDerivative, IdentityComposition) {
  auto outer = [](const MultiIndex& lambda) { return Rational(lambda.order() == 1 ? 1 : 0); };
  auto inner = [](std::size_t, const MultiIndex& l) { return Rational(l.order() == 1 ? 1 : 0); };
  EXPECT_EQ(compose_derivative<Rational>(outer, inner, MultiIndex({1}), 1, Rational(0)), 1);
  EXPECT_EQ(compose_derivative<Rational>(outer, inner, MultiIndex({2}), 1, Rational(0)), 0);
}

TEST(ComposeDerivative, GeneratingFunctionAtZero) {
  // psi^(k)(B_g) = k!, phi^(k)(0) = k! for all parameters 1
  auto outer = [](const MultiIndex& l) { return Rational(factorial(static_cast<unsigned long>(l.order()))); };
  auto inner = [](std::size_t, const MultiIndex& l) {
    return Rational(factorial(static_cast<unsigned long>(l.order())));
  };
  EXPECT_EQ(compose_derivative<Rational>(outer, inner, MultiIndex({3}), 1, Rational(0)), 24);
}

TEST(ComposeDerivative, ZeroOrderReturnsComposite) {
  auto outer = [](const MultiIndex&) { return Rational(7); };
  auto inner = [](std::size_t, const MultiIndex&) { return Rational(1); };
  EXPECT_EQ(compose_derivative<Rational>(outer, inner, MultiIndex({0}), 1, Rational(0)), 7);
}

ExpPoly zero_poly(std::size_t m, const Rational& a) { return ExpPoly(m, Alpha(a)); }

class ExpOfU : public ::testing::TestWithParam<Rational> {};

// exp∘u_alpha against n-fold differentiation of P_alpha.
TEST_P(ExpOfU, MatchesRecursiveDifferentiation) {
  const Rational a = GetParam();
  const ExpPoly P = construct(BasicKind::kPAlpha, 1, a);
  const ExpPoly u = construct(BasicKind::kUAlpha, 1, a);
  ExpPoly direct = P;
  for (int n = 1; n <= 12; ++n) {
    direct = differentiate(direct, std::size_t{0});
    auto outer = [&](const MultiIndex&) { return P; };
    auto inner = [&](std::size_t, const MultiIndex& l) {
      return differentiate(u, std::span<const int>(l.entries()));
    };
    ExpPoly chain = compose_derivative<ExpPoly>(outer, inner, MultiIndex({n}), 1, zero_poly(1, a));
    EXPECT_EQ(chain, direct) << "n=" << n;
  }
}

INSTANTIATE_TEST_SUITE_P(Alphas, ExpOfU, ::testing::Values(Rational(1), Rational(3, 2), Rational(2)));

// f(y1, y2) = exp(y1 + 2 y2), g = (u(x1), u(x2) + u(x1)/2): f∘g = exp_of_linear((2, 2)).
TEST(ComposeDerivative, BivariateOuterAndInner) {
  const Rational a(3, 2);
  const ExpPoly u1 = construct(BasicKind::kUAlpha, 2, a, {}, 0, 0);
  const ExpPoly u2 = construct(BasicKind::kUAlpha, 2, a, {}, 0, 1);
  const std::vector<ExpPoly> g{u1, u2 + u1 * Rational(1, 2)};
  const std::vector<Rational> w{2, 2};
  const ExpPoly composite = construct(BasicKind::kExpOfLinear, 2, a, w);
  for (const MultiIndex& nu : multi_indices_up_to(2, 5)) {
    if (nu.is_zero()) continue;
    auto outer = [&](const MultiIndex& lambda) { return composite * rational_pow(Rational(2), lambda[1]); };
    auto inner = [&](std::size_t c, const MultiIndex& l) {
      return differentiate(g[c], std::span<const int>(l.entries()));
    };
    ExpPoly chain = compose_derivative<ExpPoly>(outer, inner, nu, 2, zero_poly(2, a));
    EXPECT_EQ(chain, differentiate(composite, std::span<const int>(nu.entries())))
        << "nu=(" << nu[0] << "," << nu[1] << ")";
  }
}

}  // namespace
}  // namespace mildkit
