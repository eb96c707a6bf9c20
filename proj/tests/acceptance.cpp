// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <boost/math/quadrature/exp_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "squarefall/arith.hpp"
#include "squarefall/gf2.hpp"
#include "squarefall/limit.hpp"
#include "squarefall/process.hpp"
#include "squarefall/rng.hpp"
#include "squarefall/smooth.hpp"
#include "squarefall/witness.hpp"

using namespace squarefall;
using arith::u64;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Bisection, kept separate from the library root finder.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) < 0) == (f(mid) < 0) ? lo = mid : hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  const double published[6][3] = {{1, 1, 1},
                                  {.7499, .7517, .7677},
                                  {.6415, .6448, .6745},
                                  {.5962, .6011, .6422},
                                  {.5764, .5823, .6324},
                                  {.567, .575, .630}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = limit::eta_table(limit::EtaMode::Table);
  const double secs = seconds_since(t0);
  double worst = 0;
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      const double tol = r == 5 ? 0.002 : 0.001;
      const double d = std::fabs(t.value[r][c] - published[r][c]);
      worst = std::max(worst, d);
      std::ostringstream cell;
      cell << "k=" << r << " col " << c << " got " << t.value[r][c];
      o.require(d <= tol, cell.str());
    }
  const double series_root =
      bisect([](double e) { return e + e * e / 2 - e * e * e / 12 + e * e * e * e / 72 - 1; }, 0.0, 1.0);
  o.require(std::fabs(t.value[1][0] - series_root) <= 1e-3, "k=1 M=inf vs series root");
  o.require(secs < 60, "runtime");
  o.detail << "18 entries, max deviation " << worst << "; series root " << series_root << " vs "
           << t.value[1][0] << "; " << secs << " s";
}

void criterion2(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Count inf = Count::infinite();
  const auto below = limit::gamma_fixed(limit::kInf, inf, 0.55);
  const auto above = limit::gamma_fixed(limit::kInf, inf, 0.57);
  const auto s = limit::eta_star();
  const double e_g = std::exp(-kEulerGamma);
  const double integral = limit::gamma_over_u_integral(e_g - 1e-3, limit::kInf, inf);
  const double secs = seconds_since(t0);
  o.require(below.converged, "converges at 0.55");
  o.require(!above.converged, "diverges at 0.57");
  o.require(std::fabs(s.sup_probe - e_g) <= 1e-5, "sup probe");
  o.require(integral > 0.9 && integral < 1.0, "integral window");
  o.require(secs < 30, "runtime");
  o.detail << "gamma(0.55)=" << below.value << " after " << below.iterations << " its; 0.57 diverges after "
           << above.iterations << " its; sup probe - e^-gamma = " << s.sup_probe - e_g
           << "; integral " << integral << "; " << secs << " s";
}

void criterion3(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  boost::math::quadrature::exp_sinh<double> es;
  double worst = 0;
  for (double z : {0.5, 1.0, 5.0, 50.0}) {
    const double gamma0 = es.integrate([](double t) { return std::exp(-t) / t; }, z, INFINITY);
    const double d = std::fabs(limit::a_M(limit::kInf, z) - std::log(z) - kEulerGamma - gamma0);
    worst = std::max(worst, d);
    o.require(d <= 1e-8, "z=" + std::to_string(z));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 1, "runtime");
  o.detail << "max |A - log z - gamma - Gamma(0,z)| = " << worst << "; " << secs << " s";
}

void criterion4(Outcome& o) {
  const double g = smooth::g_integral(1.0, 1e4);
  o.require(std::fabs(g - 0.818780) <= 1e-3, "g(1,1e4)");
  o.detail << "g(1,1e4) = " << g << ", gamma + log(4/pi) = " << kEulerGamma + std::log(4 / std::numbers::pi);
}

void criterion5(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t N = 100'000;
  std::size_t points = 0;
  double worst = 0;
  u64 index = 0;
  for (unsigned k : {2u, 3u, 4u})
    for (double M : {10.0, 100.0})
      for (double eta : {0.3, 0.56})
        for (double rho : {1.0, 2.0}) {
          limit::LimitParams p;
          p.m = 3;
          p.k = k;
          p.M = M;
          p.eta = eta;
          p.rho = rho;
          const double th = limit::theta(p);
          Rng rng(derive_seed(20240101, index++));
          const auto est = limit::estimate_theta_mc(p, N, rng);
          const double sigma = std::sqrt(th * (1 - th) / N);
          const double z = std::fabs(est.fraction - th) / sigma;
          worst = std::max(worst, z);
          ++points;
          std::ostringstream what;
          what << "k=" << k << " M=" << M << " eta=" << eta << " rho=" << rho << " theta=" << th
               << " mc=" << est.fraction;
          o.require(z <= 3, what.str());
        }
  const double secs = seconds_since(t0);
  o.require(points == 24, "grid size");
  o.require(secs < 600, "runtime");
  o.detail << points << " points (m=3), N=" << N << ", max |z| = " << worst << "; " << secs << " s";
}

// Dependence check for one short list of class vectors: every dependency
// the eliminator reports must XOR to zero and appear exactly when an
// exhaustive search first finds a zero-sum subset ending at that insertion;
// the final rank deficiency must equal log2 of the number of zero-sum subsets.
bool exhaustive_agrees(const std::vector<gf2::ExponentVector>& vs) {
  const std::size_t n = vs.size();
  std::map<u64, std::size_t> col;
  for (const auto& v : vs)
    for (u64 p : v.odd_primes) col.emplace(p, col.size());
  if (col.size() > 64) return false;
  std::vector<std::uint64_t> mask(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (u64 p : vs[i].odd_primes) mask[i] |= std::uint64_t{1} << col.at(p);

  // zero_ending[i]: some zero-sum subset has largest element i.
  std::vector<bool> zero_ending(n, false);
  std::size_t zero_subsets = 1;  // the empty set
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << n); ++s) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1) acc ^= mask[i];
    if (acc == 0) {
      ++zero_subsets;
      zero_ending[31 - std::countl_zero(s)] = true;
    }
  }

  gf2::Eliminator e;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = e.insert(vs[i], i + 1);
    const auto* dep = std::get_if<gf2::Dependent>(&r);
    if ((dep != nullptr) != zero_ending[i]) return false;
    if (dep) {
      std::uint64_t acc = 0;
      for (u64 id : dep->ids) acc ^= mask[id - 1];
      if (acc != 0 || dep->ids.back() != i + 1) return false;
    }
  }
  return (std::size_t{1} << e.rank_deficiency()) == zero_subsets;
}

void criterion6(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const u64 x = 100'000'000;
  const auto table = arith::sieve_primes(smooth::params_table_bound(x));
  const auto params = smooth::find_params(x, smooth::PsiMode::Exact, table);
  const std::vector<u64> ys = {params.y0 / 2, params.y0, 2 * params.y0};
  const std::vector<double> Ms = {2.0, 10.0, 100.0};
  const std::vector<Count> ks = {Count(1), Count(2), Count(3), Count::infinite()};
  const std::vector<unsigned> ms = {1, 2, 3};

  std::size_t streams = 0, violations = 0, short_checked = 0, short_mismatch = 0;
  u64 total_Z = 0, total_def = 0;
  for (u64 s = 0; s < 520; ++s) {
    Rng pick(derive_seed(777, s));
    const u64 y = ys[pick() % ys.size()];
    const double M = Ms[pick() % Ms.size()];
    const Count k = ks[pick() % ks.size()];
    const unsigned m = ms[pick() % ms.size()];
    // Half the streams are short enough for the exhaustive oracle.
    const std::size_t J = s % 2 ? static_cast<std::size_t>(params.J0 * (0.25 + 0.75 * pick.uniform01()))
                                : 20 + pick() % 100;
    process::ProcessConfig cfg;
    cfg.x = x;
    cfg.seed = derive_seed(778, s);
    cfg.class_params = process::ClassParams{y, M, k};
    const auto stream = process::simulate_stream(cfg, J, table);
    const auto w = witness::count_pseudosmooths(stream, witness::ChiParams{m, k, M});
    ++streams;
    total_Z += w.Z;
    total_def += w.rank_deficiency;
    if (w.Z > w.rank_deficiency) ++violations;

    std::vector<gf2::ExponentVector> vs;
    for (const auto& c : stream)
      if (c.tag != process::ClassTag::Delta) vs.push_back(gf2::ExponentVector::from_primes(c.primes));
    if (vs.size() <= 25) {
      ++short_checked;
      if (!exhaustive_agrees(vs)) ++short_mismatch;
    }
  }
  const double secs = seconds_since(t0);
  o.require(streams >= 500, "stream count");
  o.require(violations == 0, "Z <= rank deficiency");
  o.require(short_checked > 0 && short_mismatch == 0, "exhaustive oracle");
  o.detail << streams << " streams at x=1e8, " << violations << " violations of Z <= deficiency (sum Z "
           << total_Z << ", sum deficiency " << total_def << "); " << short_checked
           << " streams with <= 25 insertions checked exhaustively, " << short_mismatch << " mismatches; "
           << secs << " s";
}

void criterion7(Outcome& o) {
  const auto small = arith::sieve_primes(1'000'000);
  std::size_t compared = 0, disagreements = 0;
  for (u64 x : {1ULL, 2ULL, 10ULL, 97ULL, 1000ULL, 30030ULL, 65536ULL, 100000ULL, 524287ULL, 999999ULL,
                1000000ULL})
    for (u64 y : {1ULL, 2ULL, 3ULL, 7ULL, 30ULL, 100ULL, 997ULL, 10000ULL, 1000000ULL}) {
      ++compared;
      if (smooth::psi_exact_sweep(x, y, small) != smooth::psi_exact_recursive(x, y, small)) ++disagreements;
    }
  o.require(disagreements == 0, "sweep vs recursive");
  o.detail << compared << " (x,y) pairs up to 1e6, " << disagreements << " disagreements;";

  const auto big = arith::sieve_primes(1000);
  for (auto [x, y] : std::vector<std::pair<u64, u64>>{{1'000'000, 100}, {100'000'000, 1000}}) {
    const double exact = static_cast<double>(smooth::psi_exact(x, y, big));
    const double ht = smooth::psi_ht(x, y, big);
    const double dk = smooth::psi_dickman(x, y);
    const double e_ht = std::fabs(ht / exact - 1), e_dk = std::fabs(dk / exact - 1);
    std::ostringstream tag;
    tag << "(" << x << "," << y << ")";
    o.require(e_ht <= 0.15, "psi_ht at " + tag.str());
    o.require(e_dk <= 0.20, "psi_dickman at " + tag.str());
    o.detail << " " << tag.str() << ": exact " << exact << ", ht " << ht << " (" << 100 * e_ht << "%), dickman "
             << dk << " (" << 100 * e_dk << "%);";
  }
  const double r2 = smooth::dickman_rho(2.0);
  o.require(std::fabs(r2 - (1 - std::log(2.0))) <= 1e-6, "rho(2)");
  o.detail << " rho(2) - (1 - log 2) = " << r2 - (1 - std::log(2.0));
}

void criterion8(Outcome& o) {
  const u64 x = 1'000'000;
  const auto table = arith::sieve_primes(smooth::params_table_bound(x));
  const auto params = smooth::find_params(x, smooth::PsiMode::Exact, table);
  const auto results = process::run_campaign(x, 200, 8, process::default_threads(), table, params.J0);
  std::size_t failures = 0, truncated = 0, checked = 0, not_unique = 0;
  for (const auto& r : results) {
    if (r.truncated) {
      ++truncated;
      continue;
    }
    // Independent certificate: multiply exponent vectors of the I values.
    std::map<u64, unsigned> exps;
    for (u64 v : r.I_values)
      for (const auto& pp : arith::factorize(v, table).factors) exps[pp.prime] += pp.exponent;
    bool square = !r.I.empty() && r.square_verified;
    for (const auto& [p, e] : exps) square = square && e % 2 == 0;
    failures += !square;
    if (r.T <= process::kExhaustiveUniquenessMax) {
      ++checked;
      if (!r.unique_verified || !*r.unique_verified) ++not_unique;
    }
  }
  o.require(results.size() == 200 && truncated == 0, "all trials complete");
  o.require(failures == 0, "square certificates");
  o.require(not_unique == 0, "uniqueness");
  u64 min_T = ~0ULL;
  for (const auto& r : results) min_T = std::min(min_T, r.T);
  o.detail << results.size() << " trials at x=1e6, " << failures << " certificate failures; " << checked
           << " trials with T <= 25 checked exhaustively (" << not_unique << " not unique); smallest T = " << min_T;
}

void criterion9(Outcome& o) {
  for (u64 x : {1'000'000ULL, 10'000'000ULL, 100'000'000ULL}) {
    const auto table = arith::sieve_primes(smooth::params_table_bound(x));
    const auto params = smooth::find_params(x, smooth::PsiMode::Exact, table);
    const auto results = process::run_campaign(x, 200, 9, process::default_threads(), table, params.J0);
    const auto rep = process::theorem2_diagnostics(results, params);
    std::ostringstream tag;
    tag << "median at x=" << x;
    o.require(rep.median_T_over_J0 > 0 && rep.median_T_over_J0 < 1.1, tag.str());
    o.detail << " x=" << x << ": J0 " << params.J0 << ", median T/J0 " << rep.median_T_over_J0 << ", mean "
             << rep.mean_T_over_J0 << ", |I| in window " << rep.frac_size_in_window << ";";
  }
  o.detail << " e^-gamma = " << std::exp(-kEulerGamma) << " (limit not asserted)";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, void (*)(Outcome&)>> criteria = {
      {"eta table", criterion1},          {"critical constant", criterion2},
      {"A-function identity", criterion3}, {"g-integral limit", criterion4},
      {"theta cross-validation", criterion5}, {"witness soundness", criterion6},
      {"smooth-number engine", criterion7}, {"process sanity", criterion8},
      {"desk-scale campaign", criterion9}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failed += !o.pass;
    std::cout << "criterion " << n << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << " -- "
              << o.detail.str() << std::endl;
  }
  return failed ? 1 : 0;
}
