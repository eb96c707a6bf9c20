#pragma once

#include <functional>
#include <utility>

namespace squarefall::numeric {

/// Adaptive Gauss-Kronrod (7/15) integral of f over the finite interval
/// [a, b], to absolute tolerance abs_tol (relative tolerance rel_tol when the
/// integral is large).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-13);

/// Root of a monotone-or-bracketed function on [lo, hi]; f(lo) and f(hi)
/// must differ in sign. Terminates when the bracket is narrower than
/// x_tol (absolute) or f hits zero exactly.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double x_tol = 1e-14, unsigned max_iter = 400);

/// Golden-section maximization of a unimodal function on [lo, hi].
/// Returns (argmax, max) at the final bracket's best probe.
std::pair<double, double> golden_maximize(const std::function<double(double)>& f,
                                          double lo, double hi,
                                          double x_tol = 1e-6,
                                          unsigned max_iter = 200);

}  // namespace squarefall::numeric
