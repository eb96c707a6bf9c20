#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "squarefall/process.hpp"
#include "squarefall/rng.hpp"

using namespace squarefall;
using namespace squarefall::process;

namespace {

const arith::PrimeTable& table() {
  static const auto t = arith::sieve_primes(1'000'000);
  return t;
}

std::function<u64()> from_list(std::vector<u64> vs) {
  auto pos = std::make_shared<std::size_t>(0);
  return [vs, pos] { return vs.at((*pos)++); };
}

bool product_is_square(const std::vector<u64>& vs) {
  std::map<u64, u64> e;
  for (u64 v : vs)
    for (const auto& pp : arith::factorize(v, table()).factors) e[pp.prime] += pp.exponent;
  for (const auto& [p, n] : e)
    if (n % 2) return false;
  return true;
}

}  // namespace

TEST_CASE("x = 1 stops at the first draw") {
  ProcessConfig cfg;
  cfg.x = 1;
  const auto r = run_until_dependence(cfg, table());
  CHECK(r.T == 1);
  CHECK(r.I == std::vector<u64>{1});
  CHECK(r.square_verified);
  REQUIRE(r.unique_verified.has_value());
  CHECK(*r.unique_verified);
}

TEST_CASE("hand-built streams") {
  ProcessConfig cfg;
  cfg.x = 1000;
  auto r = run_on_source(from_list({49}), cfg, table());
  CHECK(r.T == 1);
  CHECK(r.I_size() == 1);
  CHECK(r.max_prime_in_I == 7);

  r = run_on_source(from_list({2, 3, 5, 6}), cfg, table());
  CHECK(r.T == 4);
  CHECK(r.I == std::vector<u64>{1, 2, 4});
  CHECK(r.I_values == std::vector<u64>{2, 3, 6});
  CHECK(r.square_verified);
  CHECK(*r.unique_verified);
  // P(2), P(3) in bucket 1, P(6) = 3 in bucket 1.
  CHECK(r.largest_prime_log2_hist == std::vector<u64>{0, 3});

  cfg.max_samples = 3;
  r = run_on_source(from_list({2, 3, 5, 6}), cfg, table());
  CHECK(r.truncated);
  CHECK(r.I.empty());
}

TEST_CASE("exhaustive subset check") {
  std::vector<arith::Factorization> fs;
  for (u64 v : {2, 3, 6, 5}) fs.push_back(arith::factorize(v, table()));
  CHECK_FALSE(other_square_subset_exists(fs, {0, 1, 2}));
  CHECK(other_square_subset_exists(fs, {0, 1}));
  fs.push_back(arith::factorize(10, table()));
  // {2,5,10} joins {2,3,6}.
  CHECK(other_square_subset_exists(fs, {0, 1, 2}));
}

TEST_CASE("classify") {
  const u64 y = 100;
  const double M = 10;
  CHECK(classify(2 * 3 * 97, y, M, table()) == ExponentClass::smooth());
  CHECK(classify(1, y, M, table()) == ExponentClass::smooth());
  CHECK(classify(6 * 101 * 101, y, M, table()) == ExponentClass::smooth());
  CHECK(classify(6 * 101 * 503, y, M, table()) == ExponentClass::large({503, 101}));
  CHECK(classify(101ULL * 101 * 101 * 7, y, M, table()) == ExponentClass::large({101}));
  CHECK(classify(6 * 1009, y, M, table()) == ExponentClass::delta());
  CHECK(classify(6 * 1009 * 1009, y, M, table()) == ExponentClass::delta());
  CHECK(classify(101 * 1009, y, M, table()) == ExponentClass::delta());
  // The window is open at My: y = 64, M = 997/64 (exact in binary) gives My = 997.
  const double m997 = 997.0 / 64;
  CHECK(classify(997, 64, m997, table()) == ExponentClass::delta());
  CHECK(classify(997 * 997, 64, m997, table()) == ExponentClass::smooth());
  CHECK(classify(991, 64, m997, table()) == ExponentClass::large({991}));
  CHECK(ExponentClass::large({503, 101}).to_string() == "{101,503}");
}

TEST_CASE("stream determinism and smooth fraction") {
  ProcessConfig cfg;
  cfg.x = 100'000'000;
  cfg.seed = 31;
  cfg.class_params = ClassParams{1000, 10.0};
  const std::size_t J = 100'000;
  const auto a = simulate_stream(cfg, J, table());
  const auto b = simulate_stream(cfg, J, table());
  CHECK(a == b);
  std::size_t smooth_count = 0;
  for (const auto& c : a) smooth_count += c.tag == ClassTag::Smooth;
  // [n] is empty iff n = s q^2 with s 1000-smooth and q = 1 or a prime in
  // (1000, 10000); two such q, or q^4, already exceed x.
  u64 exact = smooth::psi_exact(cfg.x, 1000, table());
  for (u64 q : table().primes())
    if (q > 1000 && q < 10000) exact += smooth::psi_exact(cfg.x / (q * q), 1000, table());
  const double p = static_cast<double>(exact) / static_cast<double>(cfg.x);
  const double sigma = std::sqrt(J * p * (1 - p));
  CHECK(std::abs(static_cast<double>(smooth_count) - J * p) < 3 * sigma);
}

TEST_CASE("singleton class frequency") {
  // x = 10^6, y = 100, p = 101: a has class {101} iff a = 101 m with m
  // 100-smooth (101^2 m would need m <= 98 smooth and 101^3 > x, and the
  // square of a window prime already exceeds x / 101).
  ProcessConfig cfg;
  cfg.x = 1'000'000;
  cfg.seed = 5;
  cfg.class_params = ClassParams{100, 10.0};
  const std::size_t J = 200'000;
  const auto s = simulate_stream(cfg, J, table());
  std::size_t hits = 0;
  for (const auto& c : s) hits += c == ExponentClass::large({101});
  // Oracle: direct count over [1, x].
  std::size_t direct = 0;
  for (u64 n = 1; n <= cfg.x; ++n)
    if (n % 101 == 0 && classify(n, 100, 10.0, table()) == ExponentClass::large({101})) ++direct;
  CHECK(direct == smooth::psi_exact(cfg.x / 101, 100, table()));
  const double p = static_cast<double>(direct) / static_cast<double>(cfg.x);
  const double sigma = std::sqrt(J * p * (1 - p));
  CHECK(std::abs(static_cast<double>(hits) - J * p) < 3 * sigma);
}

TEST_CASE("sampler uniformity") {
  Rng rng(123);
  const u64 x = 1'000'003;
  const std::size_t J = 1'000'000;
  std::vector<double> bins(16, 0);
  for (std::size_t j = 0; j < J; ++j) {
    const u64 v = rng.uniform_in_1_to_x(x);
    REQUIRE(v >= 1);
    REQUIRE(v <= x);
    bins[(v - 1) * 16 / x] += 1;
  }
  double stat = 0;
  for (std::size_t b = 0; b < 16; ++b) {
    // Exact bin sizes for (v - 1) * 16 / x.
    const u64 lo = (b * x + 15) / 16, hi = ((b + 1) * x + 15) / 16;
    const double expect = static_cast<double>(J) * static_cast<double>(hi - lo) / x;
    stat += (bins[b] - expect) * (bins[b] - expect) / expect;
  }
  const boost::math::chi_squared dist(15);
  CHECK(boost::math::cdf(boost::math::complement(dist, stat)) > 1e-6);
}

TEST_CASE("campaign at x = 10^6") {
  const auto params = smooth::find_params(1'000'000, smooth::PsiMode::Exact, table());
  const auto results = run_campaign(1'000'000, 200, 2024, 2, table(), params.J0);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    REQUIRE_FALSE(r.truncated);
    CHECK(r.trial == i);
    CHECK(r.square_verified);
    CHECK(product_is_square(r.I_values));
    CHECK(r.I.back() == r.T);
    CHECK(r.T_over_J0 > 0);
    CHECK(r.T_over_J0 < 1.1);
    if (r.unique_verified) CHECK(*r.unique_verified);
  }
  // Thread count does not change anything.
  const auto serial = run_campaign(1'000'000, 20, 2024, 1, table(), params.J0);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].T == results[i].T);
    CHECK(serial[i].I == results[i].I);
  }
  const auto rep = theorem2_diagnostics(results, params);
  CHECK(rep.completed == 200);
  CHECK(rep.median_T_over_J0 > 0);
  CHECK(rep.median_T_over_J0 < 1.1);
  CHECK(rep.size_lo < rep.size_hi);
}

TEST_CASE("small x exercises the uniqueness check") {
  std::size_t checked = 0;
  for (u64 i = 0; i < 100; ++i) {
    ProcessConfig cfg;
    cfg.x = 100;
    cfg.seed = derive_seed(8, i);
    const auto r = run_until_dependence(cfg, table());
    CHECK(r.square_verified);
    if (r.unique_verified) {
      ++checked;
      CHECK(*r.unique_verified);
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("diagnostics buckets") {
  smooth::SmoothParams params;
  params.y0 = 113;
  params.J0 = 328;
  std::vector<TrialResult> rs(3);
  for (auto& r : rs) {
    r.T = 1;
    r.I = {1};
    r.max_prime_in_I = 2;
  }
  rs[2].truncated = true;
  const auto rep = theorem2_diagnostics(rs, params);
  CHECK(rep.single_square == 2);
  CHECK(rep.early_single == 2);
  CHECK(rep.truncated == 1);
  CHECK(rep.c3 == doctest::Approx(1.1430).epsilon(1e-3));
  CHECK_THROWS(theorem2_diagnostics({}, params));
}
