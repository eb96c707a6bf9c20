#include "squarefall/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace squarefall::arith {

namespace {

constexpr u64 kTrialDivisionLimit = 10'000;

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

PrimeTable::PrimeTable(u64 bound, u64 spf_bound) : bound_(bound) {
  if (bound < 2 || bound > kMaxSieveBound)
    throw std::invalid_argument("sieve bound out of range [2, 1e9]: " +
                                std::to_string(bound));
  if (spf_bound > bound)
    throw std::invalid_argument("spf bound exceeds sieve bound");

  // Base primes up to sqrt(bound) by a plain sieve.
  const u64 root = isqrt(bound);
  std::vector<char> small(root + 1, 1);
  std::vector<std::uint32_t> base;
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(static_cast<std::uint32_t>(i));
    for (u64 j = i * i; j <= root; j += i) small[j] = 0;
  }

  // Odd-only segmented sieve; index i in a segment stands for lo + 2i.
  primes_.reserve(static_cast<std::size_t>(
      1.1 * static_cast<double>(bound) / std::log(static_cast<double>(bound)) + 16));
  primes_.push_back(2);
  constexpr u64 kSegment = 1 << 18;
  std::vector<char> seg(kSegment);
  for (u64 lo = 3; lo <= bound; lo += 2 * kSegment) {
    const u64 hi = std::min(bound, lo + 2 * kSegment - 1);
    const u64 count = (hi - lo) / 2 + 1;
    std::fill(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(count), 1);
    for (std::size_t bi = 1; bi < base.size(); ++bi) {
      const u64 p = base[bi];
      if (p * p > hi) break;
      u64 start = std::max(p * p, (lo + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (u64 m = start; m <= hi; m += 2 * p) seg[(m - lo) / 2] = 0;
    }
    for (u64 i = 0; i < count; ++i)
      if (seg[i]) primes_.push_back(static_cast<std::uint32_t>(lo + 2 * i));
  }

  if (spf_bound >= 2) {
    spf_.assign(spf_bound + 1, 0);
    for (std::uint32_t p : primes_) {
      if (p > spf_bound) break;
      for (u64 m = p; m <= spf_bound; m += p)
        if (spf_[m] == 0) spf_[m] = p;
    }
  }
}

std::size_t PrimeTable::pi(u64 y) const {
  if (y > bound_)
    throw std::out_of_range("pi(" + std::to_string(y) +
                            ") exceeds table bound " + std::to_string(bound_));
  return static_cast<std::size_t>(
      std::upper_bound(primes_.begin(), primes_.end(), y) - primes_.begin());
}

u64 PrimeTable::prev_prime(u64 y) const {
  const std::size_t n = pi(y);
  return n == 0 ? 0 : primes_[n - 1];
}

bool PrimeTable::contains(u64 n) const {
  if (n > bound_) throw std::out_of_range("contains: beyond table bound");
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

std::uint32_t PrimeTable::spf(u64 n) const {
  if (n < 2 || n >= spf_.size())
    throw std::out_of_range("spf: argument outside table");
  return spf_[n];
}

PrimeTable sieve_primes(u64 bound, u64 spf_bound) {
  return PrimeTable(bound, spf_bound);
}

std::size_t prime_pi(const PrimeTable& table, u64 y) { return table.pi(y); }

u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

namespace {

// 128-bit modular arithmetic for moduli below 2^127 (sums never overflow).
u128 add_mod128(u128 a, u128 b, u128 m) {
  u128 s = a + b;
  return s >= m ? s - m : s;
}

u128 mul_mod128(u128 a, u128 b, u128 m) {
  if ((a >> 64) == 0 && (b >> 64) == 0 && (m >> 64) == 0)
    return (a * b) % m;
  u128 result = 0;
  a %= m;
  while (b) {
    if (b & 1) result = add_mod128(result, a, m);
    a = add_mod128(a, a, m);
    b >>= 1;
  }
  return result;
}

u128 pow_mod128(u128 base, u128 exp, u128 m) {
  u128 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod128(result, base, m);
    base = mul_mod128(base, base, m);
    exp >>= 1;
  }
  return result;
}

constexpr unsigned kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

}  // namespace

bool is_probable_prime(u128 n) {
  if (n < 2) return false;
  for (unsigned p : kWitnesses) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u128 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (unsigned a : kWitnesses) {
    u128 x = pow_mod128(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod128(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 pollard_brent(u64 n, unsigned max_retries) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1; c <= max_retries; ++c) {
    auto f = [n, c](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    u64 y = 2, x = 2, ys = 2, q = 1, g = 1;
    const u64 m = 128;
    u64 r = 1;
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1 && r < (u64{1} << 40));
    if (g == n) {
      // Backtrack one step at a time from the last saved state.
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return 0;
}

namespace {

void split_cofactor(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out.push_back(n);
    return;
  }
  // Perfect squares defeat some rho parameter choices; peel them first.
  const u64 r = isqrt(n);
  if (r * r == n) {
    split_cofactor(r, out);
    split_cofactor(r, out);
    return;
  }
  const u64 d = pollard_brent(n);
  if (d == 0)
    throw std::runtime_error("failed to split composite " + std::to_string(n) +
                             " within the retry budget");
  split_cofactor(d, out);
  split_cofactor(n / d, out);
}

}  // namespace

Factorization factorize(u64 n, const PrimeTable& table, u64 cap) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  if (n > cap)
    throw std::invalid_argument("factorize: n = " + std::to_string(n) +
                                " exceeds cap " + std::to_string(cap));
  Factorization f;
  f.n = n;
  u64 rest = n;
  const u64 limit = std::min<u64>(kTrialDivisionLimit, table.bound());
  for (std::uint32_t p : table.primes()) {
    if (p > limit) break;
    if (static_cast<u64>(p) * p > rest) break;
    if (rest % p) continue;
    unsigned e = 0;
    do {
      rest /= p;
      ++e;
    } while (rest % p == 0);
    f.factors.push_back({p, e});
  }
  if (rest == 1) return f;

  std::vector<u64> big;
  if (rest <= limit * limit) {
    big.push_back(rest);  // no factor below sqrt(rest) remains
  } else {
    split_cofactor(rest, big);
  }
  std::sort(big.begin(), big.end());
  for (std::size_t i = 0; i < big.size();) {
    std::size_t j = i;
    while (j < big.size() && big[j] == big[i]) ++j;
    f.factors.push_back({big[i], static_cast<unsigned>(j - i)});
    i = j;
  }
  return f;
}

Factorization factorize_spf(u64 n, const PrimeTable& table) {
  if (n == 0) throw std::invalid_argument("factorize_spf: n must be positive");
  Factorization f;
  f.n = n;
  while (n > 1) {
    const u64 p = table.spf(n);
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.factors.push_back({p, e});
  }
  return f;
}

Factorization merge(const Factorization& a, const Factorization& b) {
  Factorization out;
  out.n = a.n * b.n;
  std::size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size() ||
        (i < a.factors.size() && a.factors[i].prime < b.factors[j].prime)) {
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size() || b.factors[j].prime < a.factors[i].prime) {
      out.factors.push_back(b.factors[j++]);
    } else {
      out.factors.push_back(
          {a.factors[i].prime, a.factors[i].exponent + b.factors[j].exponent});
      ++i;
      ++j;
    }
  }
  return out;
}

bool Factorization::is_perfect_square() const {
  return std::all_of(factors.begin(), factors.end(),
                     [](const PrimePower& pp) { return pp.exponent % 2 == 0; });
}

}  // namespace squarefall::arith
