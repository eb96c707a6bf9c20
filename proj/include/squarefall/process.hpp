#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "squarefall/arith.hpp"
#include "squarefall/common.hpp"
#include "squarefall/smooth.hpp"

namespace squarefall::process {

using arith::PrimeTable;
using arith::u64;

/// Large-prime window (y, My) plus the hyperedge size cap k used downstream.
struct ClassParams {
  u64 y = 0;
  double M = 10.0;
  Count k = Count::infinite();
};

struct ProcessConfig {
  u64 x = 0;
  u64 seed = 0;               // seed of this trial's generator
  u64 max_samples = 1 << 24;  // truncation point
  std::optional<ClassParams> class_params;
  double J0 = 0.0;  // only used to fill T_over_J0 when positive
};

enum class ClassTag { Smooth, Large, Delta };

/// The set of primes in (y, My) dividing n to an odd power; Delta when n has
/// a prime factor that cannot be recorded that way.
struct ExponentClass {
  ClassTag tag = ClassTag::Smooth;
  std::vector<u64> primes;  // ascending, nonempty exactly for Large

  static ExponentClass smooth() { return {}; }
  static ExponentClass delta() { return {ClassTag::Delta, {}}; }
  static ExponentClass large(std::vector<u64> ps);
  bool operator==(const ExponentClass&) const = default;
  std::string to_string() const;
};

/// Classifies n >= 1. Delta when some prime factor exceeds My, or equals My
/// to an odd power (the window is open, and such a prime could not be
/// tracked); otherwise the odd-power primes strictly between y and My.
ExponentClass classify(u64 n, u64 y, double M, const PrimeTable& table);
ExponentClass classify(const arith::Factorization& f, u64 y, double M);

struct TrialResult {
  u64 trial = 0;
  u64 seed = 0;
  bool truncated = false;
  u64 T = 0;                  // index (1-based) of the first dependence
  std::vector<u64> I;         // ascending indices, always containing T
  std::vector<u64> I_values;  // a_i for i in I
  u64 max_prime_in_I = 1;
  double T_over_J0 = 0.0;
  bool square_verified = false;        // exact exponent sums all even
  std::optional<bool> unique_verified;  // exhaustive check, only when T <= 25
  /// Elements of I bucketed by floor(log2 P(a)), P(1) = 1 in bucket 0.
  std::vector<u64> largest_prime_log2_hist;

  std::size_t I_size() const { return I.size(); }
};

inline constexpr u64 kExhaustiveUniquenessMax = 25;

/// Draws a_1, a_2, ... uniformly from [1, x] until the first square
/// dependence (or max_samples draws).
TrialResult run_until_dependence(const ProcessConfig& cfg, const PrimeTable& table);

/// The same process on an explicit value source (values must lie in [1, x]
/// for the cap check only; any positive integers are accepted).
TrialResult run_on_source(const std::function<u64()>& next, const ProcessConfig& cfg,
                          const PrimeTable& table);

/// True when some nonempty subset of the given values other than `expected`
/// has square product; exhaustive over all 2^n - 1 subsets (n <= 30).
bool other_square_subset_exists(const std::vector<arith::Factorization>& values,
                                const std::vector<u64>& expected_zero_based);

/// J classes of IID uniform draws from [1, x] (needs cfg.class_params).
std::vector<ExponentClass> simulate_stream(const ProcessConfig& cfg, std::size_t J,
                                           const PrimeTable& table);

/// Independent trials with per-trial seeds derived from master_seed; the
/// result order and content do not depend on the thread count.
std::vector<TrialResult> run_campaign(u64 x, std::size_t trials, u64 master_seed,
                                      unsigned threads, const PrimeTable& table,
                                      double J0 = 0.0, u64 max_samples = 1 << 24);

inline const double kC3 = std::sqrt(2.0 - std::numbers::ln2);

struct Theorem2Report {
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::size_t truncated = 0;
  double epsilon = 0.0;
  double c3 = kC3;
  // (b): y0 exp(-(c3+eps) sqrt(log y0)) <= |I| <= y0 exp((c3+eps) sqrt(log y0))
  double size_lo = 0, size_hi = 0;
  double frac_size_in_window = 0;
  // (c): every element of I is B-smooth, B = y0^2 exp((2+eps) sqrt(log y0 log log y0))
  double smooth_bound = 0;
  double frac_smooth_in_bound = 0;
  // (a): trials with T < (pi/4)(e^-gamma - eps) J0, and those with |I| = 1
  double early_threshold = 0;
  std::size_t early = 0;
  std::size_t early_single = 0;
  std::size_t single_square = 0;  // trials with |I| = 1 overall
  double mean_I_size = 0, median_I_size = 0;
  double mean_T_over_J0 = 0, median_T_over_J0 = 0;
};

Theorem2Report theorem2_diagnostics(const std::vector<TrialResult>& results,
                                    const smooth::SmoothParams& params, double epsilon = 0.0);

/// Default thread count: SQUAREFALL_THREADS if set and positive, else the
/// hardware concurrency (at least 1).
unsigned default_threads();

}  // namespace squarefall::process
