#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "coretail/errors.hpp"

namespace coretail {

struct SolverConfig {
  double tol_x = 1e-10;  // relative interval width
  double tol_f = 1e-12;
  int max_iter = 200;
  // one-dimensional simplex coefficients
  double nm_reflect = 1.0;
  double nm_expand = 2.0;
  double nm_contract = 0.5;
  double nm_shrink = 0.5;
};

namespace detail {
inline bool width_converged(double lo, double hi, double tol_x) {
  return (hi - lo) <= tol_x * (1.0 + std::min(std::abs(lo), std::abs(hi)));
}
}  // namespace detail

// Bisection on [lo, hi]; requires a sign change.
template <class F>
double bisect(F&& f, double lo, double hi, const SolverConfig& cfg = {}) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (!(flo * fhi < 0)) throw NoSignChange("bisect: f(lo) and f(hi) have the same sign");
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= cfg.tol_f || detail::width_converged(lo, hi, cfg.tol_x))
      return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  if (detail::width_converged(lo, hi, cfg.tol_x)) return 0.5 * (lo + hi);
  throw MaxIterExceeded("bisect: max_iter exceeded");
}

// Newton iteration safeguarded by bisection on a bracketing interval
// [lo, hi]; steps that leave the bracket or fail to shrink it fast enough
// fall back to bisection, so convergence is unconditional.
template <class F, class DF>
double newton(F&& f, DF&& df, double x0, double lo, double hi,
              const SolverConfig& cfg = {}) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (!(flo * fhi < 0)) throw NoSignChange("newton: root not bracketed by [lo, hi]");
  double xl = lo, xh = hi;
  if (flo > 0) std::swap(xl, xh);  // keep f(xl) < 0 < f(xh)
  double x = (x0 > std::min(lo, hi) && x0 < std::max(lo, hi)) ? x0 : 0.5 * (lo + hi);
  double step_prev = std::abs(hi - lo);
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= cfg.tol_f) return x;
    if (fx < 0)
      xl = x;
    else
      xh = x;
    const double dfx = df(x);
    const bool newton_ok =
        dfx != 0 && ((x - xh) * dfx - fx) * ((x - xl) * dfx - fx) < 0 &&
        std::abs(2.0 * fx) <= std::abs(step_prev * dfx);
    const double xnew = newton_ok ? x - fx / dfx : 0.5 * (xl + xh);
    step_prev = std::abs(xnew - x);
    if (step_prev <= cfg.tol_x * (1.0 + std::abs(xnew))) return xnew;
    x = xnew;
  }
  throw MaxIterExceeded("newton: max_iter exceeded");
}

// One-dimensional Nelder-Mead (two-point simplex) minimizer, optionally
// bounded. Returns the best point seen.
template <class G>
double nelder_mead_1d(G&& g, double x0, double step, const SolverConfig& cfg = {},
                      double lo = -std::numeric_limits<double>::infinity(),
                      double hi = std::numeric_limits<double>::infinity()) {
  auto clamp = [&](double x) { return std::min(std::max(x, lo), hi); };
  double a = clamp(x0);
  double b = clamp(x0 + step);
  if (a == b) b = clamp(x0 - step);
  if (a == b) return a;
  double fa = g(a), fb = g(b);
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (fb < fa) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
    // a is best, b worst
    if (std::abs(b - a) <= cfg.tol_x * (1.0 + std::abs(a)) &&
        std::abs(fb - fa) <= cfg.tol_f * (1.0 + std::abs(fa)))
      break;
    const double xr = clamp(a + cfg.nm_reflect * (a - b));
    const double fr = (xr == a) ? fa : g(xr);
    if (fr < fa) {
      const double xe = clamp(a + cfg.nm_expand * (a - b));
      const double fe = (xe == xr) ? fr : g(xe);
      if (fe < fr) {
        b = xe;
        fb = fe;
      } else {
        b = xr;
        fb = fr;
      }
    } else {
      const double xc = a + cfg.nm_contract * (b - a);
      const double fc = g(xc);
      if (fc < fb) {
        b = xc;
        fb = fc;
      } else {
        b = a + cfg.nm_shrink * (b - a);
        fb = g(b);
      }
    }
  }
  return fa <= fb ? a : b;
}

}  // namespace coretail
