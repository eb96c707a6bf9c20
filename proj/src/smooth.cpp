#include "squarefall/smooth.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "squarefall/numeric.hpp"

namespace squarefall::smooth {

namespace {

void require_table(const PrimeTable& table, u64 y, const char* who) {
  if (y > table.bound())
    throw std::invalid_argument(std::string(who) + ": prime table bound " +
                                std::to_string(table.bound()) +
                                " below required " + std::to_string(y));
}

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Exact counts
// ---------------------------------------------------------------------------

u64 psi_exact_sweep(u64 x, u64 y, const PrimeTable& table) {
  if (x > kPsiExactMax)
    throw std::invalid_argument("psi_exact: x = " + std::to_string(x) +
                                " above enumeration bound 1e9");
  if (x == 0) return 0;
  if (y >= x) return x;
  if (y < 2) return 1;
  require_table(table, y, "psi_exact_sweep");
  const auto primes = table.primes();
  const std::size_t np = table.pi(y);

  constexpr u64 kSegment = 1 << 20;
  std::vector<std::uint32_t> rem(kSegment);
  u64 count = 0;
  for (u64 lo = 1; lo <= x; lo += kSegment) {
    const u64 hi = std::min(x, lo + kSegment - 1);
    const u64 len = hi - lo + 1;
    for (u64 i = 0; i < len; ++i) rem[i] = static_cast<std::uint32_t>(lo + i);
    for (std::size_t k = 0; k < np; ++k) {
      const std::uint32_t p = primes[k];
      if (p > hi) break;
      for (u64 m = (lo + p - 1) / p * p; m <= hi; m += p) {
        std::uint32_t& r = rem[m - lo];
        do r /= p;
        while (r % p == 0);
      }
    }
    for (u64 i = 0; i < len; ++i) count += rem[i] == 1;
  }
  return count;
}

namespace {

// Count of n <= x whose prime factors all lie among primes[0..i].
u64 psi_by_largest(u64 x, std::size_t i, std::span<const std::uint32_t> primes) {
  if (x < 2) return x;
  if (primes[i] >= x) return x;
  if (i == 0) return static_cast<u64>(std::bit_width(x));  // powers of two
  u64 total = 1;  // n = 1
  for (std::size_t j = 0; j <= i; ++j) {
    const u64 p = primes[j];
    if (p > x) break;
    const u64 q = x / p;
    // n = p * m with P(m) <= p; if q <= p every m <= q qualifies.
    total += q <= p ? q : psi_by_largest(q, j, primes);
  }
  return total;
}

}  // namespace

u64 psi_exact_recursive(u64 x, u64 y, const PrimeTable& table) {
  if (x > kPsiExactMax)
    throw std::invalid_argument("psi_exact: x = " + std::to_string(x) +
                                " above enumeration bound 1e9");
  if (x == 0) return 0;
  if (y >= x) return x;
  if (y < 2) return 1;
  require_table(table, y, "psi_exact_recursive");
  const std::size_t np = table.pi(y);
  return psi_by_largest(x, np - 1, table.primes());
}

u64 psi_exact(u64 x, u64 y, const PrimeTable& table) {
  if (x > kPsiExactMax)
    throw std::invalid_argument("psi_exact: x above enumeration bound 1e9");
  return psi_exact_recursive(x, y, table);
}

PsiProfile::PsiProfile(u64 x, u64 y_cap, const PrimeTable& table)
    : x_(x), y_cap_(std::min(y_cap, x)), table_(&table) {
  if (x > kPsiExactMax)
    throw std::invalid_argument("PsiProfile: x above enumeration bound 1e9");
  if (x < 2) throw std::invalid_argument("PsiProfile: x < 2");
  require_table(table, y_cap_, "PsiProfile");
  const auto primes = table.primes();
  const std::size_t np = table.pi(y_cap_);
  const u64 root = isqrt(x);
  const std::size_t ndiv = table.pi(std::min(y_cap_, root));
  std::vector<u64> hist(np, 0);
  // Prime cofactors above sqrt(x) are tallied by value, then folded in.
  std::vector<std::uint32_t> by_value(ndiv < np ? y_cap_ + 1 : 0, 0);

  constexpr u64 kSegment = 1 << 20;
  constexpr std::uint32_t kNone = 0xffffffffu;
  std::vector<std::uint32_t> rem(kSegment), largest(kSegment);
  for (u64 lo = 1; lo <= x; lo += kSegment) {
    const u64 hi = std::min(x, lo + kSegment - 1);
    const u64 len = hi - lo + 1;
    for (u64 i = 0; i < len; ++i) {
      rem[i] = static_cast<std::uint32_t>(lo + i);
      largest[i] = kNone;
    }
    for (std::size_t k = 0; k < ndiv; ++k) {
      const std::uint32_t p = primes[k];
      if (p > hi) break;
      for (u64 m = (lo + p - 1) / p * p; m <= hi; m += p) {
        std::uint32_t& r = rem[m - lo];
        do r /= p;
        while (r % p == 0);
        largest[m - lo] = static_cast<std::uint32_t>(k);
      }
    }
    for (u64 i = 0; i < len; ++i) {
      if (lo + i == 1) continue;
      if (rem[i] == 1) {
        ++hist[largest[i]];
      } else if (rem[i] <= y_cap_ && ndiv < np) {
        // All primes <= sqrt(x) were removed, so the cofactor is prime.
        ++by_value[rem[i]];
      }
    }
  }
  for (std::size_t k = ndiv; k < np; ++k) hist[k] += by_value[primes[k]];
  cumulative_.resize(np);
  u64 acc = 1;
  for (std::size_t i = 0; i < np; ++i) {
    acc += hist[i];
    cumulative_[i] = acc;
  }
}

u64 PsiProfile::psi(u64 y) const {
  if (y >= x_) return x_;
  if (y > y_cap_)
    throw std::out_of_range("PsiProfile: y beyond profile cap");
  const std::size_t n = table_->pi(y);
  return n == 0 ? 1 : cumulative_[n - 1];
}

// ---------------------------------------------------------------------------
// Saddle point and estimates
// ---------------------------------------------------------------------------

double saddle_alpha(u64 x, u64 y, const PrimeTable& table) {
  if (y < 2 || y > x)
    throw std::invalid_argument("saddle_alpha: need 2 <= y <= x");
  require_table(table, y, "saddle_alpha");
  const std::size_t np = table.pi(y);
  std::vector<double> logp(np);
  for (std::size_t i = 0; i < np; ++i) logp[i] = std::log(static_cast<double>(table[i]));
  const double log_x = std::log(static_cast<double>(x));
  auto excess = [&](double a) {
    double s = 0.0;
    for (double lp : logp) s += lp / std::expm1(a * lp);
    return s - log_x;
  };
  double lo = 0.5, hi = 1.0;
  while (excess(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < 1e-12)
      throw std::domain_error("saddle_alpha: no root in [1e-12, " +
                              std::to_string(hi) + "]");
  }
  while (excess(hi) >= 0.0) {
    hi *= 2.0;
    if (hi > 64)
      throw std::domain_error("saddle_alpha: no root in [" + std::to_string(lo) +
                              ", 64]");
  }
  if (lo >= hi) lo = hi / 2;
  return numeric::find_root(excess, lo, hi, 1e-15);
}

double xi_of_u(double u) {
  if (!(u > 1.0)) throw std::domain_error("xi_of_u: requires u > 1");
  // Scaled defining equation 1 - (u xi + 1) e^-xi, negative just above the
  // trivial root at zero and positive beyond the one we want.
  auto h = [u](double xi) { return 1.0 - (u * xi + 1.0) * std::exp(-xi); };
  double lo = std::min(1.0, 1e-3 * (u - 1.0));
  while (h(lo) >= 0.0) lo *= 0.5;
  double hi = std::max(1.0, 2.0 * std::log(u * std::max(std::log(u), 1.0)) + 2.0);
  while (h(hi) <= 0.0) hi *= 2.0;
  return numeric::find_root(h, lo, hi, 1e-15 * hi);
}

namespace {

struct SaddleSums {
  double alpha, log_zeta, sigma2;
};

SaddleSums saddle_sums(u64 x, u64 y, const PrimeTable& table) {
  if (y < 2 || y > x) throw std::invalid_argument("psi_ht: need 2 <= y <= x");
  SaddleSums s{saddle_alpha(x, y, table), 0.0, 0.0};
  const std::size_t np = table.pi(y);
  for (std::size_t i = 0; i < np; ++i) {
    const double lp = std::log(static_cast<double>(table[i]));
    const double q = std::exp(-s.alpha * lp);  // p^-alpha
    s.log_zeta -= std::log1p(-q);
    // (log p)^2 p^a / (p^a - 1)^2 = (log p)^2 q / (1 - q)^2
    s.sigma2 += lp * lp * q / ((1.0 - q) * (1.0 - q));
  }
  return s;
}

}  // namespace

double psi_ht_log(u64 x, u64 y, const PrimeTable& table) {
  const SaddleSums s = saddle_sums(x, y, table);
  const double log_x = std::log(static_cast<double>(x));
  return s.alpha * log_x + s.log_zeta - std::log(s.alpha) -
         0.5 * std::log(2.0 * std::numbers::pi * s.sigma2);
}

double psi_ht_asymptotic_log(u64 x, u64 y, const PrimeTable& table) {
  const SaddleSums s = saddle_sums(x, y, table);
  const double log_x = std::log(static_cast<double>(x));
  const double log_y = std::log(static_cast<double>(y));
  return s.alpha * log_x + s.log_zeta - std::log(s.alpha) -
         0.5 * std::log(2.0 * std::numbers::pi * log_x * log_y);
}

double psi_ht(u64 x, u64 y, const PrimeTable& table) {
  return std::exp(psi_ht_log(x, y, table));
}

double psi_dickman_log(u64 x, u64 y) {
  if (y < 2) throw std::invalid_argument("psi_dickman: y < 2");
  if (x == 0) throw std::invalid_argument("psi_dickman: x = 0");
  const double log_x = std::log(static_cast<double>(x));
  if (y >= x) return log_x;
  return log_x + dickman_log_rho(log_x / std::log(static_cast<double>(y)));
}

double psi_dickman(u64 x, u64 y) {
  if (y >= x) return static_cast<double>(x);
  return std::exp(psi_dickman_log(x, y));
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

std::string to_string(PsiMode mode) { return mode == PsiMode::Exact ? "exact" : "ht"; }

PsiMode parse_psi_mode(const std::string& text) {
  if (text == "exact") return PsiMode::Exact;
  if (text == "ht") return PsiMode::HT;
  throw std::invalid_argument("unknown psi mode '" + text + "' (exact|ht)");
}

double log_L(double x) {
  const double lx = std::log(x);
  return std::sqrt(0.5 * lx * std::log(lx));
}

u64 params_table_bound(u64 x) {
  const double hi = std::exp(2.5 * log_L(static_cast<double>(x)));
  const double capped = std::min({hi * 1.01 + 16.0, static_cast<double>(x),
                                  static_cast<double>(arith::kMaxSieveBound)});
  return std::max<u64>(static_cast<u64>(capped), 100);
}

SmoothParams find_params(u64 x, PsiMode mode, const PrimeTable& table) {
  if (x < 100) throw std::invalid_argument("find_params: x < 100");
  if (mode == PsiMode::Exact && x > kPsiExactMax)
    throw std::invalid_argument("find_params: exact mode needs x <= 1e9");
  const double lx = static_cast<double>(x);
  const double logL = log_L(lx);
  const double top = std::min({static_cast<double>(table.bound()), lx,
                               std::exp(2.5 * logL)});
  const double bottom = std::max(2.0, std::min(std::exp(0.5 * logL), top / 2));

  std::optional<PsiProfile> profile;
  if (mode == PsiMode::Exact) profile.emplace(x, static_cast<u64>(top), table);
  auto log_psi = [&](u64 p) -> double {
    if (profile) return std::log(static_cast<double>(profile->psi(p)));
    return psi_ht_log(x, p, table);
  };
  // Objective over prime cutoffs: log(Psi(x, p)/p) at p = largest prime <= y.
  auto objective = [&](double log_y) {
    const u64 p = table.prev_prime(static_cast<u64>(std::exp(log_y)));
    if (p < 2) return -1e300;
    return log_psi(p) - std::log(static_cast<double>(p));
  };
  const auto [log_y_star, unused] =
      numeric::golden_maximize(objective, std::log(bottom), std::log(top), 1e-4);
  (void)unused;

  const double y_star = std::exp(log_y_star);
  const u64 scan_lo = static_cast<u64>(std::max(bottom, y_star / 2));
  const u64 scan_hi = static_cast<u64>(std::min(top, 2 * y_star));
  u64 best_p = 0;
  double best = -1e300;
  const auto primes = table.primes();
  for (std::size_t i = table.pi(scan_lo > 0 ? scan_lo - 1 : 0); i < primes.size(); ++i) {
    const u64 p = primes[i];
    if (p > scan_hi) break;
    const double v = log_psi(p) - std::log(static_cast<double>(p));
    if (v > best) {  // strict: ties keep the smaller prime
      best = v;
      best_p = p;
    }
  }
  if (best_p == 0) throw std::runtime_error("find_params: empty search window");

  SmoothParams sp;
  sp.x = x;
  sp.mode = mode;
  sp.y0 = best_p;
  sp.u0 = std::log(lx) / std::log(static_cast<double>(best_p));
  sp.psi_y0 = std::exp(log_psi(best_p));
  if (profile) sp.psi_y0 = static_cast<double>(profile->psi(best_p));
  sp.pi_y0 = table.pi(best_p);
  sp.J0 = static_cast<double>(sp.pi_y0) * lx / sp.psi_y0;
  sp.alpha0 = saddle_alpha(x, best_p, table);
  const double log_y0 = std::log(static_cast<double>(best_p));
  sp.log_y0_over_log_L = log_y0 / logL;
  const double l2 = std::log(std::log(lx));
  const double l3 = std::log(l2);
  sp.second_order_prediction = logL * (1.0 + (l3 - std::log(2.0)) / (2.0 * l2));
  sp.log_y0_over_prediction = log_y0 / sp.second_order_prediction;
  return sp;
}

PsiRatio psi_ratio_check(u64 x, u64 d, u64 y, const PrimeTable& table) {
  if (d < 1) throw std::invalid_argument("psi_ratio_check: d < 1");
  if (y < 2) throw std::invalid_argument("psi_ratio_check: y < 2");
  if (y > x / d)
    throw std::invalid_argument("psi_ratio_check: need y <= x/d");
  if (x > kPsiExactMax)
    throw std::invalid_argument("psi_ratio_check: x above 1e9");
  PsiRatio r;
  r.alpha = saddle_alpha(x, y, table);
  r.exact_ratio = static_cast<double>(psi_exact(x / d, y, table)) /
                  static_cast<double>(psi_exact(x, y, table));
  r.predicted = std::pow(static_cast<double>(d), -r.alpha);
  r.in_ratio_range = d <= y;
  return r;
}

TuneResult tune_factor_base(u64 x, double c, const PrimeTable& table,
                            TuneEstimator estimator, double y_hi) {
  if (x < 10'000) throw std::invalid_argument("tune_factor_base: x < 1e4");
  if (!(c > 0)) throw std::invalid_argument("tune_factor_base: c must be positive");
  const double lx = static_cast<double>(x);
  if (y_hi <= 0) y_hi = std::exp(2.0 * log_L(lx));
  y_hi = std::min({y_hi, static_cast<double>(table.bound()) - 1, lx});
  const double y_lo = 16.0;  // log log y > 0 from here on
  if (y_hi <= y_lo) throw std::domain_error("tune_factor_base: empty search window");

  const auto primes = table.primes();
  // pi(y) on primes, linear in between.
  auto pi_smooth = [&](double y) {
    const std::size_t k = table.pi(static_cast<u64>(y));
    if (k == 0 || k >= primes.size()) return static_cast<double>(k);
    const double a = primes[k - 1], b = primes[k];
    return static_cast<double>(k) + std::clamp((y - a) / (b - a), 0.0, 1.0);
  };
  auto log_psi = [&](double y) {
    const u64 yi = static_cast<u64>(y);
    switch (estimator) {
      case TuneEstimator::Dickman: {
        const double u = std::log(lx) / std::log(y);
        return std::log(lx) + (u <= 1 ? 0.0 : dickman_log_rho(u));
      }
      case TuneEstimator::HT:
        return psi_ht_log(x, yi, table);
      case TuneEstimator::Exact:
        return std::log(static_cast<double>(psi_exact(x, yi, table)));
    }
    return 0.0;
  };
  auto sides = [&](double log_y) {
    const double y = std::exp(log_y);
    const double lhs = std::log(c) + std::log(pi_smooth(y)) + std::log(lx) - log_psi(y);
    const double rhs = 2 * log_y - std::log(log_y) - std::log(std::log(log_y));
    return std::pair{lhs, rhs};
  };
  auto gap = [&](double log_y) {
    const auto [l, r] = sides(log_y);
    return l - r;
  };
  const double a = std::log(y_lo), b = std::log(y_hi);
  if (!(gap(a) > 0 && gap(b) < 0))
    throw std::domain_error("tune_factor_base: no crossing in [" +
                            std::to_string(y_lo) + ", " + std::to_string(y_hi) + "]");
  // Plain bisection: the exact and HT estimators are step functions in y.
  double lo = a, hi = b;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0 ? lo : hi) = mid;
  }
  TuneResult res;
  const double t = 0.5 * (lo + hi);
  res.y1 = std::exp(t);
  const auto [l, r] = sides(t);
  res.lhs = std::exp(l);
  res.rhs = std::exp(r);
  res.relative_residual = std::fabs(res.lhs / res.rhs - 1.0);
  return res;
}

double g_integral(double beta, double C) {
  if (!(beta > 0) || !(C > 0))
    throw std::invalid_argument("g_integral: beta and C must be positive");
  const double Z = C / (beta * beta);
  // log cosh(z) / z^2, with the series near zero.
  auto near = [](double z) {
    if (z < 1e-3) {
      const double z2 = z * z;
      return 0.5 - z2 / 12.0 + z2 * z2 / 45.0;
    }
    const double s = std::sinh(0.5 * z);
    return std::log1p(2.0 * s * s) / (z * z);  // cosh z - 1 = 2 sinh^2(z/2)
  };
  double integral = numeric::integrate(near, 0.0, std::min(Z, 1.0), 1e-14);
  if (Z > 1.0) {
    // log cosh z = z - log 2 + log(1 + e^-2z); the first two terms integrate
    // in closed form against dz/z^2.
    integral += std::log(Z) - std::numbers::ln2 * (1.0 - 1.0 / Z);
    auto tail = [](double z) { return std::log1p(std::exp(-2.0 * z)) / (z * z); };
    integral += numeric::integrate(tail, 1.0, std::min(Z, 40.0), 1e-14);
  }
  return integral / (beta * beta) + 1.0 - std::log(C);
}

}  // namespace squarefall::smooth
