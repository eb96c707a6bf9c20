#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace squarefall::arith {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr u64 kDefaultFactorCap = 0x7fffffffffffffffULL;  // 2^63 - 1
inline constexpr u64 kMaxSieveBound = 1'000'000'000ULL;

/// Primes up to a bound, with an optional smallest-prime-factor table.
/// Immutable after construction; safe to share between threads.
class PrimeTable {
 public:
  PrimeTable() = default;
  explicit PrimeTable(u64 bound, u64 spf_bound = 0);

  u64 bound() const { return bound_; }
  std::span<const std::uint32_t> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  std::uint32_t operator[](std::size_t i) const { return primes_[i]; }

  /// Number of primes <= y. Throws std::out_of_range when y > bound().
  std::size_t pi(u64 y) const;
  /// Largest prime <= y, or 0 when none. Requires y <= bound().
  u64 prev_prime(u64 y) const;
  /// Membership test for n <= bound().
  bool contains(u64 n) const;

  u64 spf_bound() const { return spf_.empty() ? 0 : spf_.size() - 1; }
  /// Smallest prime factor of 2 <= n <= spf_bound().
  std::uint32_t spf(u64 n) const;

 private:
  u64 bound_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> spf_;
};

/// Segmented odd-only Eratosthenes. 2 <= bound <= 10^9.
PrimeTable sieve_primes(u64 bound, u64 spf_bound = 0);

std::size_t prime_pi(const PrimeTable& table, u64 y);

/// Miller-Rabin with the first thirteen prime bases; deterministic below
/// 3.3 * 10^24 and a strong probable-prime test above that.
bool is_probable_prime(u128 n);

struct PrimePower {
  u64 prime;
  unsigned exponent;
  bool operator==(const PrimePower&) const = default;
};

struct Factorization {
  u64 n = 1;
  std::vector<PrimePower> factors;  // primes strictly increasing

  u64 largest_prime() const { return factors.empty() ? 1 : factors.back().prime; }
  bool is_perfect_square() const;
  bool operator==(const Factorization&) const = default;
};

/// Complete factorization: trial division by table primes up to 10^4, then
/// Brent's variant of Pollard rho on the cofactor.
Factorization factorize(u64 n, const PrimeTable& table,
                        u64 cap = kDefaultFactorCap);

/// Factorization read off the smallest-prime-factor table (n <= spf_bound).
Factorization factorize_spf(u64 n, const PrimeTable& table);

/// Multiplies two factorizations (merges exponents).
Factorization merge(const Factorization& a, const Factorization& b);

/// One nontrivial factor of an odd composite n, or 0 when the retry budget
/// of polynomial constants is exhausted.
u64 pollard_brent(u64 n, unsigned max_retries = 64);

u64 mul_mod(u64 a, u64 b, u64 m);
u64 pow_mod(u64 base, u64 exp, u64 m);

}  // namespace squarefall::arith
