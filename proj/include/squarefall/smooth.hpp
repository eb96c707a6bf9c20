#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "squarefall/arith.hpp"

namespace squarefall::smooth {

using arith::PrimeTable;
using arith::u64;

// ---------------------------------------------------------------------------
// Dickman rho
// ---------------------------------------------------------------------------

/// Dickman's function from per-unit-segment power series, evaluated in
/// extended precision and returned as log rho, so nothing underflows before
/// u_max = 500. Relative accuracy is near long double rounding throughout.
class DickmanTable {
 public:
  explicit DickmanTable(double u_max = 500.0, int terms = 96);

  double u_max() const { return u_max_; }
  double log_rho(double u) const;
  double rho(double u) const;

 private:
  double u_max_;
  int terms_;
  std::vector<long double> coef_;       // segment k: rho(k+1-xi) / rho(k+1)
  std::vector<long double> log_scale_;  // log rho(k+1)
};

/// Process-wide table (u <= 500), built on first use.
const DickmanTable& dickman_table();

double dickman_rho(double u);
double dickman_log_rho(double u);

// ---------------------------------------------------------------------------
// Psi(x, y)
// ---------------------------------------------------------------------------

inline constexpr u64 kPsiExactMax = 1'000'000'000ULL;

/// Exact count of y-smooth n <= x (n = 1 included), x <= 10^9. Uses the
/// recursive count, which beats the sweep by two orders of magnitude across
/// the whole range. The table must hold every prime <= min(y, x).
u64 psi_exact(u64 x, u64 y, const PrimeTable& table);

/// Segmented sweep: divide every n <= x by all primes <= y, count the ones.
/// Kept as the independent second method.
u64 psi_exact_sweep(u64 x, u64 y, const PrimeTable& table);

/// Count by largest prime factor: Psi(x, y) = 1 + sum_{p <= y} Psi(x/p, p).
u64 psi_exact_recursive(u64 x, u64 y, const PrimeTable& table);

/// Psi(x, p) for every prime cutoff up to y_cap from one sweep that records
/// the largest prime factor of each n <= x.
class PsiProfile {
 public:
  PsiProfile(u64 x, u64 y_cap, const PrimeTable& table);

  u64 x() const { return x_; }
  u64 y_cap() const { return y_cap_; }
  /// Psi(x, y) for y <= y_cap, or y >= x.
  u64 psi(u64 y) const;

 private:
  u64 x_;
  u64 y_cap_;
  const PrimeTable* table_;
  std::vector<u64> cumulative_;  // cumulative_[i] = Psi(x, p_i)
};

/// Solution of log x = sum_{p<=y} log p / (p^alpha - 1).
double saddle_alpha(u64 x, u64 y, const PrimeTable& table);

/// The root xi > 0 of e^xi = u xi + 1, u > 1.
double xi_of_u(double u);

/// Hildebrand-Tenenbaum saddle point estimate
///   x^alpha zeta(alpha, y) / (alpha sqrt(2 pi sigma2)),
/// zeta the Euler product over p <= y and sigma2 = sum (log p)^2 p^a/(p^a-1)^2
/// the second derivative of log zeta at alpha. Natural log and plain.
double psi_ht_log(u64 x, u64 y, const PrimeTable& table);
double psi_ht(u64 x, u64 y, const PrimeTable& table);

/// The same with sigma2 replaced by its large-u size log x log y. Noticeably
/// low at moderate u (about 18% at x = 10^8, y = 10^3).
double psi_ht_asymptotic_log(u64 x, u64 y, const PrimeTable& table);

/// x * rho(log x / log y), natural log and plain.
double psi_dickman_log(u64 x, u64 y);
double psi_dickman(u64 x, u64 y);

// ---------------------------------------------------------------------------
// y0, J0 and friends
// ---------------------------------------------------------------------------

enum class PsiMode { Exact, HT };

std::string to_string(PsiMode mode);
PsiMode parse_psi_mode(const std::string& text);

/// log L(x) = sqrt(1/2 log x log log x).
double log_L(double x);

struct SmoothParams {
  u64 x = 0;
  u64 y0 = 0;
  double u0 = 0;      // log x / log y0
  double J0 = 0;      // pi(y0) x / Psi(x, y0)
  double alpha0 = 0;  // alpha(x, y0)
  double psi_y0 = 0;  // the Psi value used for J0
  std::size_t pi_y0 = 0;
  PsiMode mode = PsiMode::Exact;
  // Descriptive diagnostics only.
  double log_y0_over_log_L = 0;
  double second_order_prediction = 0;  // log L (1 + (log3 x - log 2)/(2 log2 x))
  double log_y0_over_prediction = 0;
};

/// y0 maximizing Psi(x, y)/y over prime cutoffs in [L^0.5, L^2.5]: golden
/// section on log y, then (exact mode) a full scan of primes within a factor
/// two of the golden-section point. The table must reach min(L^2.5, x).
SmoothParams find_params(u64 x, PsiMode mode, const PrimeTable& table);

/// Prime table large enough for find_params at x.
u64 params_table_bound(u64 x);

struct PsiRatio {
  double exact_ratio = 0;  // Psi(x/d, y) / Psi(x, y)
  double predicted = 0;    // d^-alpha(x, y)
  double alpha = 0;
  bool in_ratio_range = false;  // 1 <= d <= y <= x/d
};

/// Compares Psi(x/d, y)/Psi(x, y) with d^-alpha(x, y). Requires d >= 1,
/// d*y <= x and x <= 10^9.
PsiRatio psi_ratio_check(u64 x, u64 d, u64 y, const PrimeTable& table);

enum class TuneEstimator { Dickman, HT, Exact };

struct TuneResult {
  double y1 = 0;
  double lhs = 0;  // c pi(y) / (Psi(x,y)/x)
  double rhs = 0;  // y^2 / (log y log log y)
  double relative_residual = 0;
};

/// Solves c pi(y)/(Psi(x,y)/x) = y^2/(log y log log y) for y by bisection
/// in log y on [e^e, y_hi]. pi is interpolated linearly between consecutive
/// primes so both sides are continuous in y.
TuneResult tune_factor_base(u64 x, double c, const PrimeTable& table,
                            TuneEstimator estimator = TuneEstimator::Dickman,
                            double y_hi = 0);

/// g(beta, C) = beta^-2 int_0^{C/beta^2} log cosh z dz/z^2 + 1 - log C.
double g_integral(double beta, double C);

}  // namespace squarefall::smooth
