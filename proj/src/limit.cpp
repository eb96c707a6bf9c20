#include "squarefall/limit.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "squarefall/numeric.hpp"

namespace squarefall::limit {

void LimitParams::validate() const {
  if (!(M > 1.0)) throw std::invalid_argument("limit: M must exceed 1");
  if (k == Count(0)) throw std::invalid_argument("limit: k must be at least 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("limit: eta must be positive");
  if (!(rho >= 1.0) || rho > M) throw std::invalid_argument("limit: rho must lie in [1, M]");
}

double exp_k(Count k, double z) {
  if (z < 0) throw std::domain_error("exp_k: negative argument");
  if (k.is_infinite()) return std::exp(z);
  double term = 1.0, sum = 0.0;
  for (unsigned j = 0; j < k.value(); ++j) {
    sum += term;
    term *= z / (j + 1);
    if (term == 0.0 || (j > z && term < 1e-17 * sum)) break;
  }
  return sum;
}

namespace {

// Alternating series; terms peak near n = z, so it is only used for z <= 4.
double ein_series(double z) {
  long double term = z, sum = 0.0L;
  for (int n = 1; n < 200; ++n) {
    const long double add = term / n;
    sum += add;
    if (std::fabs(static_cast<double>(add)) < 1e-21L) break;
    term *= -static_cast<long double>(z) / (n + 1);
  }
  return static_cast<double>(sum);
}

constexpr double kSeriesLimit = 4.0;

}  // namespace

double ein(double z) {
  if (!(z >= 0)) throw std::domain_error("ein: negative argument");
  if (z <= kSeriesLimit) return ein_series(z);
  static const double at_limit = ein_series(kSeriesLimit);
  // Beyond 4: (1 - e^-w)/w = 1/w - e^-w/w, and e^-w/w is below 1e-27 past 64.
  const double tail = numeric::integrate([](double w) { return std::exp(-w) / w; }, kSeriesLimit,
                                         std::min(z, 64.0), 1e-15, 1e-14);
  return at_limit + std::log(z / kSeriesLimit) - tail;
}

double a_M(double M, double z) {
  if (!(M > 1.0)) throw std::invalid_argument("a_M: M must exceed 1");
  if (z == 0) return 0.0;
  if (std::isinf(M)) return ein(z);
  return ein(z) - ein(z / M);
}

double gamma_m(unsigned m, double M, Count k, double u) {
  if (!(u > 0)) throw std::domain_error("gamma_m: u must be positive");
  double g = u;
  for (unsigned i = 0; i < m; ++i) g = u * exp_k(k, a_M(M, g));
  return g;
}

GammaResult gamma_fixed(double M, Count k, double u) {
  if (!(u > 0)) throw std::domain_error("gamma_fixed: u must be positive");
  if (k == Count(1)) return {true, u, 1};
  double g = u;
  for (std::size_t it = 1; it <= kMaxFixedIterations; ++it) {
    const double next = u * exp_k(k, a_M(M, g));
    if (!(next <= kDivergenceCap)) return {false, kInf, it};
    if (std::fabs(next - g) < 1e-12 * std::max(1.0, next)) return {true, next, it};
    g = next;
  }
  return {false, kInf, kMaxFixedIterations};
}

GammaResult gamma_any(Count m, double M, Count k, double u) {
  if (m.is_infinite()) return gamma_fixed(M, k, u);
  return {true, gamma_m(m.value(), M, k, u), m.value()};
}

double theta(const LimitParams& p) {
  p.validate();
  const GammaResult g = gamma_any(p.m, p.M, p.k, p.eta);
  if (!g.converged) return 1.0;
  return -std::expm1(-g.value / p.rho);
}

namespace {

// Non-root hyperedge sizes j = 1..k-1 with weights (log M)^j / j!.
struct EdgeLaw {
  double total = 0.0;
  std::discrete_distribution<unsigned> size;  // index i means size i + 1

  EdgeLaw(double M, Count k) {
    const double L = std::log(M);
    std::vector<double> w;
    double term = 1.0;
    for (unsigned j = 1; k.is_infinite() || j < k.value(); ++j) {
      term *= L / j;
      w.push_back(term);
      total += term;
      if (k.is_infinite() && j > L && term < 1e-18 * total) break;
      if (j > 400) break;
    }
    if (!w.empty()) size = std::discrete_distribution<unsigned>(w.begin(), w.end());
  }
};

struct Sampler {
  const LimitParams& p;
  Rng& rng;
  EdgeLaw law;
  double log_M;
  unsigned depth_limit;

  Sampler(const LimitParams& params, Rng& r)
      : p(params), rng(r), law(params.M, params.k), log_M(std::log(params.M)),
        depth_limit(params.m.value()) {}

  bool marked(double tau) { return rng.uniform01() < -std::expm1(-p.eta / tau); }
  double coordinate() { return std::exp(log_M * rng.uniform01()); }
  unsigned edge_count(double tau) {
    if (law.total == 0.0) return 0;
    std::poisson_distribution<unsigned> n(p.eta / tau * law.total);
    return n(rng);
  }

  void grow(MarkedHypergraph<double>& g, double tau, unsigned depth) {
    if (marked(tau)) g.marks.insert(tau);
    if (depth == depth_limit) return;
    const unsigned n = edge_count(tau);
    for (unsigned e = 0; e < n; ++e) {
      const unsigned j = law.size(rng) + 1;
      std::vector<double> edge{tau};
      for (unsigned i = 0; i < j; ++i) edge.push_back(coordinate());
      for (unsigned i = 1; i <= j; ++i) {
        g.levels[edge[i]] = depth + 1;
        grow(g, edge[i], depth + 1);
      }
      std::sort(edge.begin(), edge.end());
      g.edges.push_back(std::move(edge));
    }
  }

  bool chi_lazy(double tau, unsigned depth) {
    if (marked(tau)) return true;
    if (depth == depth_limit) return false;
    const unsigned n = edge_count(tau);
    for (unsigned e = 0; e < n; ++e) {
      const unsigned j = law.size(rng) + 1;
      bool all = true;
      for (unsigned i = 0; i < j && all; ++i) all = chi_lazy(coordinate(), depth + 1);
      if (all) return true;
    }
    return false;
  }
};

void check_sampler_params(const LimitParams& p) {
  p.validate();
  if (std::isinf(p.M)) throw std::invalid_argument("sample_H: M must be finite");
  if (p.m.is_infinite()) throw std::invalid_argument("sample_H: m must be finite");
}

}  // namespace

MarkedHypergraph<double> sample_H(const LimitParams& p, Rng& rng) {
  check_sampler_params(p);
  Sampler s(p, rng);
  MarkedHypergraph<double> g;
  g.root = p.rho;
  g.levels[p.rho] = 0;
  s.grow(g, p.rho, 0);
  return g;
}

ThetaEstimate estimate_theta_mc(const LimitParams& p, std::size_t N, Rng& rng) {
  check_sampler_params(p);
  if (N < 1) throw std::invalid_argument("estimate_theta_mc: N must be positive");
  Sampler s(p, rng);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < N; ++i) hits += s.chi_lazy(p.rho, 0);
  ThetaEstimate out;
  out.N = N;
  out.fraction = static_cast<double>(hits) / static_cast<double>(N);
  out.stderr_ = std::sqrt(out.fraction * (1 - out.fraction) / static_cast<double>(N));
  return out;
}

std::string to_string(EtaMode mode) { return mode == EtaMode::Table ? "table" : "theorem"; }

EtaMode parse_eta_mode(const std::string& text) {
  if (text == "table") return EtaMode::Table;
  if (text == "theorem") return EtaMode::Theorem;
  throw std::invalid_argument("unknown eta mode '" + text + "' (expected table or theorem)");
}

double threshold_eta(double M, Count k, EtaMode mode, Count m) {
  if (!(M > 1.0)) throw std::invalid_argument("threshold_eta: M must exceed 1");
  if (m.is_infinite() && std::isinf(M) && k.is_infinite())
    throw std::invalid_argument("threshold_eta: the fixed point needs finite M or finite k");
  Count count_index = k;
  if (mode == EtaMode::Table && !k.is_infinite()) count_index = Count(k.value() + 1);
  const auto F = [&](double u) {
    if (count_index == Count(0)) return 0.0;
    if (count_index == Count(1)) return 1.0;
    const GammaResult g = gamma_any(m, M, k, u);
    if (!g.converged) return kInf;
    return exp_k(count_index, a_M(M, g.value));
  };
  const auto excess = [&](double eta) {
    return numeric::integrate(F, 0.0, eta, 1e-12, 1e-12) - 1.0;
  };
  const double at_cap = excess(kEtaCap);
  if (!(at_cap >= 0.0))
    throw std::runtime_error("threshold_eta: no root below eta = " + std::to_string(kEtaCap) +
                             " (integral reaches " + std::to_string(at_cap + 1.0) + ")");
  return numeric::find_root(excess, 0.0, kEtaCap, 1e-10);
}

EtaTable eta_table(EtaMode mode) {
  EtaTable t;
  for (std::size_t r = 0; r < EtaTable::ks.size(); ++r)
    for (std::size_t c = 0; c < EtaTable::Ms.size(); ++c) {
      try {
        t.value[r][c] = threshold_eta(EtaTable::Ms[c], Count(EtaTable::ks[r]), mode);
      } catch (const std::runtime_error&) {
        t.value[r][c] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  return t;
}

double z_over_exp_A(double z) {
  if (!(z > 0)) throw std::domain_error("z_over_exp_A: z must be positive");
  return z * std::exp(-ein(z));
}

EtaStar eta_star() {
  EtaStar s;
  s.e_minus_gamma = std::exp(-kEulerGamma);
  s.lower_const = std::numbers::pi / 4 * s.e_minus_gamma;
  s.sup_probe = z_over_exp_A(1e6);
  return s;
}

double gamma_over_u_integral(double t, double M, Count k) {
  if (!(t > 0)) throw std::domain_error("gamma_over_u_integral: t must be positive");
  return numeric::integrate(
      [&](double u) {
        const GammaResult g = gamma_fixed(M, k, u);
        return g.converged ? g.value / u : kInf;
      },
      0.0, t, 1e-10, 1e-10);
}

}  // namespace squarefall::limit
