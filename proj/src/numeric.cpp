#include "squarefall/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace squarefall::numeric {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

// One 15-point panel. Boost reports the error of the rule mapped to [-1, 1],
// so it is rescaled to the panel here.
double panel(const std::function<double(double)>& f, double a, double b, double& err) {
  const double v = Rule::integrate(f, a, b, 0, 0, &err);
  err *= 0.5 * std::fabs(b - a);
  return v;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol) {
  if (a == b) return 0.0;
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw std::invalid_argument("integrate: interval must be finite");
  // Global adaptive scheme: keep splitting the panel with the largest error
  // until the summed error is below tolerance or the panel budget runs out.
  struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  constexpr std::size_t kMaxPanels = 4000;
  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  auto push = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0};
    p.value = panel(f, lo, hi, p.err);
    total += p.value;
    total_err += p.err;
    heap.push(p);
  };
  push(a, b);
  while (heap.size() < kMaxPanels) {
    const double tol = std::max(abs_tol, rel_tol * std::fabs(total));
    // Rounding noise in the per-panel estimates is not reducible.
    if (total_err <= tol || heap.top().err <= 1e-15 * std::fabs(heap.top().value)) break;
    const Panel worst = heap.top();
    heap.pop();
    total -= worst.value;
    total_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      total += worst.value;
      total_err += worst.err;
      break;
    }
    push(worst.a, mid);
    push(mid, worst.b);
  }
  // Re-add in a fixed order so the result does not depend on drift in the
  // running sums.
  double sum = 0.0;
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const Panel& p : panels) sum += p.value;
  return sum;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double x_tol, unsigned max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0))
    throw std::domain_error("find_root: no sign change on [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  std::uintmax_t iters = max_iter;
  auto tol = [x_tol](double l, double h) { return std::fabs(h - l) <= x_tol; };
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

std::pair<double, double> golden_maximize(const std::function<double(double)>& f,
                                          double lo, double hi, double x_tol,
                                          unsigned max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (unsigned i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    // Ties move toward the lower end.
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace squarefall::numeric
