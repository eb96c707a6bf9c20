#include "squarefall/process.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "squarefall/gf2.hpp"
#include "squarefall/rng.hpp"

namespace squarefall::process {

ExponentClass ExponentClass::large(std::vector<u64> ps) {
  if (ps.empty()) return smooth();
  std::sort(ps.begin(), ps.end());
  return {ClassTag::Large, std::move(ps)};
}

std::string ExponentClass::to_string() const {
  switch (tag) {
    case ClassTag::Smooth:
      return "{}";
    case ClassTag::Delta:
      return "delta";
    case ClassTag::Large:
      break;
  }
  std::string s = "{";
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(primes[i]);
  }
  return s + "}";
}

ExponentClass classify(const arith::Factorization& f, u64 y, double M) {
  const double top = M * static_cast<double>(y);
  std::vector<u64> large;
  for (const auto& pp : f.factors) {
    const double p = static_cast<double>(pp.prime);
    if (pp.prime <= y) continue;
    if (p > top) return ExponentClass::delta();
    if (pp.exponent % 2 == 0) continue;
    if (p == top) return ExponentClass::delta();
    large.push_back(pp.prime);
  }
  return ExponentClass::large(std::move(large));
}

ExponentClass classify(u64 n, u64 y, double M, const PrimeTable& table) {
  if (n == 0) throw std::invalid_argument("classify: n = 0");
  return classify(arith::factorize(n, table), y, M);
}

bool other_square_subset_exists(const std::vector<arith::Factorization>& values,
                                const std::vector<u64>& expected_zero_based) {
  const std::size_t n = values.size();
  if (n > 30) throw std::invalid_argument("exhaustive subset check limited to 30 values");
  // Column index for every prime seen to an odd power.
  std::map<u64, std::size_t> column;
  for (const auto& f : values)
    for (const auto& pp : f.factors)
      if (pp.exponent % 2) column.emplace(pp.prime, column.size());
  const std::size_t words = (column.size() + 63) / 64 + 1;
  std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>(words, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& pp : values[i].factors)
      if (pp.exponent % 2) {
        const std::size_t c = column.at(pp.prime);
        rows[i][c / 64] ^= std::uint64_t{1} << (c % 64);
      }
  std::uint64_t expected = 0;
  for (u64 i : expected_zero_based) expected |= std::uint64_t{1} << i;

  // Gray-code walk: subset g(m) = m ^ (m >> 1) differs from g(m-1) in bit
  // countr_zero(m).
  std::vector<std::uint64_t> acc(words, 0);
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
    const int bit = std::countr_zero(m);
    for (std::size_t w = 0; w < words; ++w) acc[w] ^= rows[bit][w];
    if (std::all_of(acc.begin(), acc.end(), [](std::uint64_t v) { return v == 0; })) {
      if ((m ^ (m >> 1)) != expected) return true;
    }
  }
  return false;
}

namespace {

std::size_t log2_bucket(u64 p) { return p <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(p) - 1); }

}  // namespace

TrialResult run_on_source(const std::function<u64()>& next, const ProcessConfig& cfg,
                          const PrimeTable& table) {
  if (cfg.max_samples < 1) throw std::invalid_argument("process: max_samples < 1");
  TrialResult res;
  res.seed = cfg.seed;
  gf2::Eliminator elim(1 << 12);
  std::vector<u64> values;
  std::vector<arith::Factorization> facts;
  for (u64 t = 1; t <= cfg.max_samples; ++t) {
    const u64 a = next();
    values.push_back(a);
    facts.push_back(arith::factorize(a, table));
    const auto r = elim.insert(gf2::ExponentVector::from(facts.back()), t);
    const auto* dep = std::get_if<gf2::Dependent>(&r);
    if (!dep) continue;

    res.T = t;
    res.I = dep->ids;
    if (cfg.J0 > 0) res.T_over_J0 = static_cast<double>(t) / cfg.J0;
    // Exact certificate from the full factorizations, not the parity rows.
    std::map<u64, u64> exponent_sum;
    for (u64 i : res.I) {
      const auto& f = facts[i - 1];
      res.I_values.push_back(values[i - 1]);
      res.max_prime_in_I = std::max(res.max_prime_in_I, f.largest_prime());
      for (const auto& pp : f.factors) exponent_sum[pp.prime] += pp.exponent;
      const std::size_t b = log2_bucket(f.largest_prime());
      if (res.largest_prime_log2_hist.size() <= b) res.largest_prime_log2_hist.resize(b + 1, 0);
      ++res.largest_prime_log2_hist[b];
    }
    res.square_verified = std::all_of(exponent_sum.begin(), exponent_sum.end(),
                                      [](const auto& kv) { return kv.second % 2 == 0; });
    if (t <= kExhaustiveUniquenessMax) {
      std::vector<u64> zero_based;
      for (u64 i : res.I) zero_based.push_back(i - 1);
      res.unique_verified = !other_square_subset_exists(facts, zero_based);
    }
    return res;
  }
  res.truncated = true;
  res.T = cfg.max_samples;
  return res;
}

TrialResult run_until_dependence(const ProcessConfig& cfg, const PrimeTable& table) {
  if (cfg.x < 1) throw std::invalid_argument("process: x < 1");
  if (cfg.x > arith::kDefaultFactorCap) throw std::invalid_argument("process: x above 2^63 - 1");
  Rng rng(cfg.seed);
  return run_on_source([&] { return rng.uniform_in_1_to_x(cfg.x); }, cfg, table);
}

std::vector<ExponentClass> simulate_stream(const ProcessConfig& cfg, std::size_t J,
                                           const PrimeTable& table) {
  if (!cfg.class_params) throw std::invalid_argument("simulate_stream: class parameters missing");
  if (cfg.x < 1) throw std::invalid_argument("simulate_stream: x < 1");
  const ClassParams& cp = *cfg.class_params;
  Rng rng(cfg.seed);
  std::vector<ExponentClass> out;
  out.reserve(J);
  for (std::size_t j = 0; j < J; ++j)
    out.push_back(classify(rng.uniform_in_1_to_x(cfg.x), cp.y, cp.M, table));
  return out;
}

unsigned default_threads() {
  if (const char* env = std::getenv("SQUAREFALL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrialResult> run_campaign(u64 x, std::size_t trials, u64 master_seed,
                                      unsigned threads, const PrimeTable& table, double J0,
                                      u64 max_samples) {
  std::vector<TrialResult> results(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        ProcessConfig cfg;
        cfg.x = x;
        cfg.seed = derive_seed(master_seed, i);
        cfg.max_samples = max_samples;
        cfg.J0 = J0;
        results[i] = run_until_dependence(cfg, table);
        results[i].trial = i;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double d : v) s += d;
  return s / static_cast<double>(v.size());
}

}  // namespace

Theorem2Report theorem2_diagnostics(const std::vector<TrialResult>& results,
                                    const smooth::SmoothParams& params, double epsilon) {
  if (results.empty()) throw std::invalid_argument("theorem2_diagnostics: no trials");
  Theorem2Report r;
  r.trials = results.size();
  r.epsilon = epsilon;
  const double y0 = static_cast<double>(params.y0);
  const double ly = std::log(y0);
  r.size_lo = y0 * std::exp(-(kC3 + epsilon) * std::sqrt(ly));
  r.size_hi = y0 * std::exp((kC3 + epsilon) * std::sqrt(ly));
  r.smooth_bound = y0 * y0 * std::exp((2.0 + epsilon) * std::sqrt(ly * std::log(ly)));
  r.early_threshold = std::numbers::pi / 4 * (std::exp(-kEulerGamma) - epsilon) * params.J0;

  std::vector<double> sizes, ratios;
  std::size_t in_window = 0, in_bound = 0;
  for (const auto& t : results) {
    if (t.truncated) {
      ++r.truncated;
      continue;
    }
    ++r.completed;
    const double size = static_cast<double>(t.I_size());
    sizes.push_back(size);
    ratios.push_back(static_cast<double>(t.T) / params.J0);
    if (size >= r.size_lo && size <= r.size_hi) ++in_window;
    if (static_cast<double>(t.max_prime_in_I) <= r.smooth_bound) ++in_bound;
    if (t.I_size() == 1) ++r.single_square;
    if (static_cast<double>(t.T) < r.early_threshold) {
      ++r.early;
      if (t.I_size() == 1) ++r.early_single;
    }
  }
  if (r.completed) {
    r.frac_size_in_window = static_cast<double>(in_window) / static_cast<double>(r.completed);
    r.frac_smooth_in_bound = static_cast<double>(in_bound) / static_cast<double>(r.completed);
  }
  r.mean_I_size = mean(sizes);
  r.median_I_size = median(sizes);
  r.mean_T_over_J0 = mean(ratios);
  r.median_T_over_J0 = median(ratios);
  return r;
}

}  // namespace squarefall::process
