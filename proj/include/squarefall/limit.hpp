#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "squarefall/common.hpp"
#include "squarefall/hypergraph.hpp"
#include "squarefall/rng.hpp"

namespace squarefall::limit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LimitParams {
  Count m = 2;
  double M = 10.0;  // may be kInf
  Count k = Count::infinite();
  double eta = 0.5;
  double rho = 1.0;

  void validate() const;
};

/// sum_{j<k} z^j / j!, the full exponential for infinite k.
double exp_k(Count k, double z);

/// Ein(z) = int_0^z (1 - e^-w)/w dw.
double ein(double z);

/// A_M(z) = int_{1/M}^1 (1 - e^{-zt})/t dt = Ein(z) - Ein(z/M); M may be kInf.
double a_M(double M, double z);

/// gamma_{m,M,k}(u) by m applications of z -> u exp_k(A_M(z)) starting at u.
double gamma_m(unsigned m, double M, Count k, double u);

struct GammaResult {
  bool converged = true;
  double value = 0.0;  // +inf when divergent
  std::size_t iterations = 0;
};

inline constexpr double kDivergenceCap = 1e9;
inline constexpr std::size_t kMaxFixedIterations = 100000;

/// Smallest fixed point of z -> u exp_k(A_M(z)) by monotone iteration from u.
GammaResult gamma_fixed(double M, Count k, double u);

/// gamma_m for finite m, the fixed point for infinite m.
GammaResult gamma_any(Count m, double M, Count k, double u);

/// 1 - exp(-gamma_{m,M,k}(eta)/rho); 1 when the fixed point diverges.
double theta(const LimitParams& p);

/// One draw of the marked limit hypergraph of depth m rooted at rho.
MarkedHypergraph<double> sample_H(const LimitParams& p, Rng& rng);

struct ThetaEstimate {
  double fraction = 0.0;
  double stderr_ = 0.0;
  std::size_t N = 0;
};

/// Fraction of N draws with chi at the root. The hypergraph is revealed
/// lazily, stopping as soon as chi at the root is decided; the unrevealed
/// parts are independent of what was seen, so the law of the outcome is the
/// same as for a full draw.
ThetaEstimate estimate_theta_mc(const LimitParams& p, std::size_t N, Rng& rng);

enum class EtaMode { Table, Theorem };
std::string to_string(EtaMode mode);
EtaMode parse_eta_mode(const std::string& text);

inline constexpr double kEtaCap = 2.0;

/// The eta solving int_0^eta F(u) du = 1, with
///   table mode:   F(u) = exp_{k+1}(A_M(gamma_{m,M,k}(u)))
///   theorem mode: F(u) = exp_k(A_M(gamma_{m,M,k}(u))) = gamma_{m+1,M,k}(u)/u
/// where m = infinity means the fixed point.
double threshold_eta(double M, Count k, EtaMode mode, Count m = Count::infinite());

struct EtaTable {
  static constexpr std::array<unsigned, 6> ks{0, 1, 2, 3, 4, 5};
  static constexpr std::array<double, 3> Ms{kInf, 100.0, 10.0};
  std::array<std::array<double, 3>, 6> value{};  // [k][column]
};

EtaTable eta_table(EtaMode mode = EtaMode::Table);

struct EtaStar {
  double e_minus_gamma = 0.0;
  double lower_const = 0.0;  // (pi/4) e^-gamma
  double sup_probe = 0.0;    // z e^{-A(z)} at z = 10^6
};

EtaStar eta_star();

/// z e^{-A(z)} with M = infinity; increases to e^-gamma.
double z_over_exp_A(double z);

/// int_0^t gamma_{M,k}(u)/u du using the fixed point.
double gamma_over_u_integral(double t, double M, Count k);

}  // namespace squarefall::limit
