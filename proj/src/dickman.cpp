#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "squarefall/smooth.hpp"

namespace squarefall::smooth {

// On the segment k <= u <= k+1 put xi = k + 1 - u and rho(u) = f_k(xi). The
// delay equation u rho'(u) = -rho(u - 1) becomes
//   f_k'(xi) = f_{k-1}(xi) / (k + 1 - xi),
// so the Taylor coefficients of f_k at xi = 0 follow from those of f_{k-1}
// with only positive terms. The constant term comes from the integral form
// (k + 1) rho(k + 1) = int_k^{k+1} rho, i.e. a_0 k = sum_{n>=1} a_n/(n + 1),
// again positive. Nothing cancels, so relative accuracy does not decay with u
// the way it does for a forward step of the delay equation.
//
// Every f_k (k >= 1) has radius of convergence 2 (the log singularity of
// 1 - log u at u = 0 propagates), so 96 terms are ample on 0 <= xi <= 1.
// Coefficients are stored normalized by the segment's constant term, whose
// log is kept separately.
DickmanTable::DickmanTable(double u_max, int terms) : u_max_(u_max), terms_(terms) {
  if (u_max < 2) throw std::invalid_argument("DickmanTable: u_max < 2");
  if (terms < 16) throw std::invalid_argument("DickmanTable: too few terms");
  const int segments = static_cast<int>(std::ceil(u_max));
  coef_.assign(static_cast<std::size_t>(segments + 1) * terms, 0.0L);
  log_scale_.assign(segments + 1, 0.0L);

  // Segment 0: rho = 1.
  coef_[0] = 1.0L;
  std::vector<long double> next(terms);
  for (int k = 1; k <= segments; ++k) {
    const long double* prev = &coef_[static_cast<std::size_t>(k - 1) * terms];
    const long double inv = 1.0L / (k + 1);
    // b_n = sum_{i<=n} prev_i inv^(n-i+1), built by the running recurrence
    // b_n = inv (b_{n-1} + prev_n).
    long double b = 0.0L;
    for (int n = 0; n + 1 < terms; ++n) {
      b = inv * (b + prev[n]);
      next[n + 1] = b / (n + 1);
    }
    long double tail = 0.0L;
    for (int n = terms - 1; n >= 1; --n) tail += next[n] / (n + 1);
    next[0] = tail / k;
    long double* out = &coef_[static_cast<std::size_t>(k) * terms];
    for (int n = 0; n < terms; ++n) out[n] = next[n] / next[0];
    log_scale_[k] = log_scale_[k - 1] + std::log(next[0]);
  }
}

double DickmanTable::log_rho(double u) const {
  if (!(u >= 0.0)) throw std::domain_error("dickman: negative u");
  if (u <= 1.0) return 0.0;
  if (u > u_max_)
    throw std::domain_error("dickman: u = " + std::to_string(u) +
                            " beyond table limit " + std::to_string(u_max_));
  if (u <= 2.0) return std::log1p(-std::log(u));
  const int k = static_cast<int>(std::floor(u));
  const long double xi = static_cast<long double>(k + 1) - u;
  const long double* c = &coef_[static_cast<std::size_t>(k) * terms_];
  long double acc = 0.0L;
  for (int n = terms_ - 1; n >= 0; --n) acc = acc * xi + c[n];
  return static_cast<double>(log_scale_[k] + std::log(acc));
}

double DickmanTable::rho(double u) const { return std::exp(log_rho(u)); }

const DickmanTable& dickman_table() {
  static const DickmanTable table;
  return table;
}

double dickman_rho(double u) { return dickman_table().rho(u); }
double dickman_log_rho(double u) { return dickman_table().log_rho(u); }

}  // namespace squarefall::smooth
