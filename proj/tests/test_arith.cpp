#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "squarefall/arith.hpp"

using namespace squarefall::arith;

namespace {

// Plain full-array Eratosthenes, independent of the segmented odd-only sieve.
std::vector<u64> naive_primes(u64 bound) {
  std::vector<char> is(bound + 1, 1);
  is[0] = 0;
  if (bound >= 1) is[1] = 0;
  for (u64 i = 2; i * i <= bound; ++i)
    if (is[i])
      for (u64 j = i * i; j <= bound; j += i) is[j] = 0;
  std::vector<u64> out;
  for (u64 i = 2; i <= bound; ++i)
    if (is[i]) out.push_back(i);
  return out;
}

bool trial_division_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

u64 rebuild(const Factorization& f) {
  u64 v = 1;
  for (const auto& pp : f.factors)
    for (unsigned e = 0; e < pp.exponent; ++e) v *= pp.prime;
  return v;
}

}  // namespace

TEST_CASE("sieve small bounds") {
  const PrimeTable t10 = sieve_primes(10);
  REQUIRE(t10.size() == 4);
  CHECK(t10[0] == 2);
  CHECK(t10[1] == 3);
  CHECK(t10[2] == 5);
  CHECK(t10[3] == 7);
  const PrimeTable t2 = sieve_primes(2);
  REQUIRE(t2.size() == 1);
  CHECK(t2[0] == 2);
  CHECK_THROWS_AS(sieve_primes(1), std::invalid_argument);
  CHECK_THROWS_AS(sieve_primes(kMaxSieveBound + 1), std::invalid_argument);
}

TEST_CASE("sieve agrees with a second sieve up to 10^6") {
  const PrimeTable t = sieve_primes(1'000'000);
  const auto ref = naive_primes(1'000'000);
  REQUIRE(t.size() == ref.size());
  CHECK(t.size() == 78498);
  for (std::size_t i = 0; i < ref.size(); ++i) REQUIRE(t[i] == ref[i]);
}

TEST_CASE("segment boundaries") {
  // Bounds straddling the segment size of the sieve.
  for (u64 b : {65'535ULL, 65'536ULL, 65'537ULL, 1'048'575ULL, 1'048'577ULL, 2'000'003ULL}) {
    const PrimeTable t = sieve_primes(b);
    const auto ref = naive_primes(b);
    REQUIRE(t.size() == ref.size());
    CHECK(t.primes().back() == ref.back());
  }
}

TEST_CASE("prime_pi") {
  const PrimeTable t = sieve_primes(200'000);
  CHECK(prime_pi(t, 1) == 0);
  CHECK(prime_pi(t, 2) == 1);
  CHECK(prime_pi(t, 10) == 4);
  const auto ref = naive_primes(100'000);
  CHECK(prime_pi(t, 100'000) == ref.size());
  CHECK(ref.size() == 9592);
  CHECK_THROWS_AS(prime_pi(t, 200'001), std::out_of_range);
  CHECK(t.prev_prime(100) == 97);
  CHECK(t.prev_prime(1) == 0);
  CHECK(t.contains(199'999));
  CHECK_FALSE(t.contains(199'997));
}

TEST_CASE("miller-rabin against trial division") {
  CHECK_FALSE(is_probable_prime(0));
  CHECK_FALSE(is_probable_prime(1));
  CHECK(is_probable_prime(2));
  CHECK_FALSE(is_probable_prime(3215031751ULL));
  CHECK_FALSE(trial_division_prime(3215031751ULL));
  for (u64 n = 0; n < 20'000; ++n) REQUIRE(is_probable_prime(n) == trial_division_prime(n));
  std::mt19937_64 gen(11);
  for (int i = 0; i < 2000; ++i) {
    const u64 n = gen() >> 30;  // < 2^34, trial division stays cheap
    REQUIRE(is_probable_prime(n) == trial_division_prime(n));
  }
  // Strong pseudoprimes to several small bases.
  for (u64 n : {2047ULL, 1373653ULL, 25326001ULL, 3215031751ULL, 2152302898747ULL,
                3474749660383ULL, 341550071728321ULL, 3825123056546413051ULL})
    CHECK_FALSE(is_probable_prime(n));
  CHECK(is_probable_prime(18446744073709551557ULL));  // largest 64-bit prime
  const u128 m61 = (u128{1} << 61) - 1;
  CHECK(is_probable_prime(m61));
  CHECK(is_probable_prime((u128{1} << 89) - 1));
  CHECK_FALSE(is_probable_prime(m61 * m61));
}

TEST_CASE("factorize basics") {
  const PrimeTable t = sieve_primes(100'000);
  CHECK(factorize(1, t).factors.empty());
  const Factorization f = factorize(360, t);
  REQUIRE(f.factors.size() == 3);
  CHECK(f.factors[0] == PrimePower{2, 3});
  CHECK(f.factors[1] == PrimePower{3, 2});
  CHECK(f.factors[2] == PrimePower{5, 1});
  CHECK_THROWS_AS(factorize(0, t), std::invalid_argument);
  CHECK_THROWS_AS(factorize(1000, t, 999), std::invalid_argument);
  CHECK(factorize(49, t).is_perfect_square());
  CHECK_FALSE(factorize(50, t).is_perfect_square());
}

TEST_CASE("factorize products of two 28-bit primes") {
  const PrimeTable t = sieve_primes(100'000);
  std::mt19937_64 gen(5);
  auto random_prime = [&] {
    for (;;) {
      const u64 c = (gen() & ((1ULL << 28) - 1)) | (1ULL << 27) | 1;
      if (trial_division_prime(c)) return c;
    }
  };
  for (int i = 0; i < 50; ++i) {
    u64 p = random_prime(), q = random_prime();
    if (p > q) std::swap(p, q);
    const Factorization f = factorize(p * q, t);
    if (p == q) {
      REQUIRE(f.factors.size() == 1);
      CHECK(f.factors[0] == PrimePower{p, 2});
    } else {
      REQUIRE(f.factors.size() == 2);
      CHECK(f.factors[0] == PrimePower{p, 1});
      CHECK(f.factors[1] == PrimePower{q, 1});
    }
  }
}

TEST_CASE("factorize large composites") {
  const PrimeTable t = sieve_primes(20'000);
  std::mt19937_64 gen(17);
  for (int i = 0; i < 300; ++i) {
    const u64 n = (gen() >> 1) | 1;
    const Factorization f = factorize(n, t);
    CHECK(rebuild(f) == n);
    for (std::size_t j = 0; j < f.factors.size(); ++j) {
      CHECK(is_probable_prime(f.factors[j].prime));
      if (j) CHECK(f.factors[j - 1].prime < f.factors[j].prime);
    }
  }
  // Square and cube of a prime above the trial-division limit.
  const u64 p = 1'000'003;
  CHECK(factorize(p * p, t).factors == std::vector<PrimePower>{{p, 2}});
  CHECK(factorize(p * p * p, t).factors == std::vector<PrimePower>{{p, 3}});
  CHECK(factorize(kDefaultFactorCap, t).n == kDefaultFactorCap);
}

TEST_CASE("spf table agrees with trial division and rho up to 10^6") {
  const PrimeTable t = sieve_primes(1'000'000, 1'000'000);
  // Force the rho path by a table with a tiny trial-division range.
  const PrimeTable small = sieve_primes(30);
  for (u64 n = 2; n <= 1'000'000; ++n) {
    REQUIRE(t.spf(n) == factorize(n, t).factors.front().prime);
    REQUIRE(factorize_spf(n, t) == factorize(n, small));
  }
}

TEST_CASE("merge is multiplicative") {
  const PrimeTable t = sieve_primes(100'000);
  std::mt19937_64 gen(3);
  for (int i = 0; i < 500; ++i) {
    const u64 a = (gen() & ((1ULL << 30) - 1)) + 1;
    const u64 b = (gen() & ((1ULL << 30) - 1)) + 1;
    CHECK(merge(factorize(a, t), factorize(b, t)) == factorize(a * b, t));
  }
}
