#include "coretail/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "coretail/detail/alg_series.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coretail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAlphaLo = 1.0 + 1e-9;
constexpr double kAlphaHi = 1e3;

double as_d(std::size_t v) { return static_cast<double>(v); }

// ---- closed-form pieces ------------------------------------------------------

double uni_alpha_hat(const SplitStats& st, double lxm) {
  const double L = st.mean_ln_tail - lxm;
  return 0.5 + std::sqrt(0.25 + as_d(st.n) / (as_d(st.n_tail) * L));
}

double pow_alpha_hat_fixed(const SplitStats& st, double lxm, double b) {
  const double L = st.mean_ln_tail - lxm;
  return 0.5 * (1 - b +
                (1 + b) * std::sqrt(1 + 4 * as_d(st.n) /
                                            ((b + 1) * as_d(st.n_tail) * L)));
}

// both stationary betas at fixed x_min; out-of-range values are filtered later
std::array<double, 2> pow_beta_hats(const SplitStats& st, double lxm) {
  const double ls = lxm - st.mean_ln_core;          // <ln(x_min/x)>_S
  const double ll = st.mean_ln_tail - lxm;          // <ln(x/x_min)>_L
  const double root = std::sqrt(as_d(st.n_tail) * as_d(st.n_core) * ls * ll);
  const double n = as_d(st.n);
  return {-1 + n / (as_d(st.n_core) * ls + root),
          -1 + n / (as_d(st.n_core) * ls - root)};
}

// (e^b - 1)/b, positive everywhere
double expm1_over(double b) { return std::expm1(b) / b; }

double exp_alpha_hat_fixed(const SplitStats& st, double lxm, double b) {
  const double L = st.mean_ln_tail - lxm;
  const double t = expm1_over(b);
  const double r = std::sqrt(1 + 4 * as_d(st.n) * t / (as_d(st.n_tail) * L));
  return 1 + 0.5 * (r - 1) / t;
}

// (e^b (b-1) + 1), series for small |b|
double exp_e1(double b) {
  if (std::abs(b) < 0.1) {
    double sum = 0, p = b * b, fact = 2;  // sum_{k>=2} (k-1) b^k / k!
    for (int k = 2; k <= 22; ++k) {
      sum += (k - 1) * p / fact;
      p *= b;
      fact *= (k + 1);
    }
    return sum;
  }
  return std::expm1(b) * (b - 1) + b;
}

// (e^b (b-1) + 1)/(b D) with D = (a-1)(e^b-1)+b; positive for all b != 0
double exp_e1_over_bd(double a, double b) {
  if (b > 300) {
    const double s = std::exp(-b);
    return (b - 1 + s) / (b * ((a - 1) * (1 - s) + b * s));
  }
  return exp_e1(b) / (b * ((a - 1) * std::expm1(b) + b));
}

// d lnL / d beta at fixed x_min
double exp_dldb(const SplitStats& st, double x_min, double a, double b) {
  return -(a - 1) * exp_e1_over_bd(a, b) * as_d(st.n) -
         as_d(st.n_core) * (st.mean_core / x_min - 1);
}

// (e^b - 1 - b)/b^2 (shared with families.cpp would be nicer; small enough to repeat)
double exp_m1_core(double b) {
  if (std::abs(b) < 0.5) {
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 22; ++k) {
      term *= b / (k + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(b) - b) / (b * b);
}

// interior closed forms for the exp family at a given beta
double exp_interior_alpha(const SplitStats& st, double b) {
  return 1 + as_d(st.n_core) / as_d(st.n_tail) * b / std::expm1(b);
}

double exp_interior_xmin(const SplitStats& st, double b) {
  // <x>_S * b (e^b - 1)/(e^b - 1 - b)
  return st.mean_core * expm1_over(b) / exp_m1_core(b);
}

// scalar function whose roots give interior stationary betas
double exp_interior_zfun(const SplitStats& st, double b) {
  const double w = st.mean_ln_tail - std::log(st.mean_core) +
                   std::log(b * exp_m1_core(b) / std::expm1(b));
  const double rad =
      1 + 4 * std::expm1(b) * as_d(st.n) / (b * as_d(st.n_tail) * w);
  if (!(rad >= 0)) return std::numeric_limits<double>::quiet_NaN();
  return -2 * as_d(st.n) + as_d(st.n_tail) * (1 + std::sqrt(rad));
}

double alg_alpha_hat(double lambda, double b) {
  return (3 * b + 1) / (4 * b + 2) +
         std::sqrt((1 + b) * (4 + lambda + b * (8 + lambda)) / lambda) /
             (4 * b + 2);
}

// ---- forced-family score functions (d lnL / d alpha at fixed x_min) ----------

double fpow_score(const SplitStats& st, double lxm, double a) {
  const double ll = st.mean_ln_tail - lxm;
  const double ls = lxm - st.mean_ln_core;
  return (a * a + 1) * as_d(st.n) / (a * a * a - a) - as_d(st.n_tail) * ll -
         as_d(st.n_core) * ls;
}

double fpow_score_deriv(const SplitStats& st, double a) {
  const double a2 = a * a;
  return -(a2 * a2 + 4 * a2 - 1) * as_d(st.n) / (a2 * (a2 - 1) * (a2 - 1));
}

double fexp_score(const SplitStats& st, double x_min, double a) {
  const double ll = st.mean_ln_tail - std::log(x_min);
  const double core = st.mean_core / x_min - 1;
  const double frac = a / ((a - 1) + std::exp(-a));
  return as_d(st.n) * (1 / a + 1 / (a - 1) - frac) - as_d(st.n_tail) * ll -
         as_d(st.n_core) * core;
}

double fexp_score_deriv(const SplitStats& st, double a) {
  const double den = (a - 1) + std::exp(-a);
  return as_d(st.n) * (-1 / (a * a) - 1 / ((a - 1) * (a - 1)) -
                       (std::exp(-a) * (1 + a) - 1) / (den * den));
}

// forced-alg score and derivative need the core observations
double falg_score(const SortedSample& s, const SplitStats& st, double lxm,
                  double a) {
  const double ll = st.mean_ln_tail - lxm;
  double core = 0;
  const double* lv = s.ln_values().data();
  for (std::size_t i = 0; i < st.n_core; ++i) {
    const double lr = lv[i] - lxm;  // <= 0
    const double u = std::exp(a * lr);
    core += lr * u / (2 - u);
  }
  return -as_d(st.n_tail) * ll + 2 * as_d(st.n) * a / (a * a - 1) -
         2 * as_d(st.n) / a - core;
}

double falg_score_deriv(const SortedSample& s, const SplitStats& st, double lxm,
                        double a) {
  double core = 0;
  const double* lv = s.ln_values().data();
  for (std::size_t i = 0; i < st.n_core; ++i) {
    const double lr = lv[i] - lxm;
    const double u = std::exp(a * lr);
    core += 2 * lr * lr * u / ((2 - u) * (2 - u));
  }
  const double a2 = a * a;
  return -2 * as_d(st.n) * (a2 + 1) / ((a2 - 1) * (a2 - 1)) +
         2 * as_d(st.n) / a2 - core;
}

// Solve d lnL/d alpha = 0 on (1, 1e3] by safeguarded Newton; the score is
// +inf at alpha -> 1+. Throws NoSolutionInRange when no root is bracketed.
template <class F, class DF>
double solve_alpha_root(F&& score, DF&& dscore, double init,
                        const SolverConfig& cfg, double scale) {
  SolverConfig c = cfg;
  c.tol_f = cfg.tol_f * std::max(1.0, scale);
  try {
    return newton(score, dscore, init, kAlphaLo, kAlphaHi, c);
  } catch (const NoSignChange&) {
    throw NoSolutionInRange("no stationary alpha in (1, 1e3] at this x_min");
  } catch (const MaxIterExceeded&) {
    throw NoSolutionInRange("alpha root iteration did not converge");
  }
}

// ---- beta grids ----------------------------------------------------------------

// Geometric magnitude grid on both sides of zero for bracketing roots in beta.
std::vector<double> beta_grid(const FitOptions& opt) {
  std::vector<double> g;
  const double hi = std::max(std::abs(opt.beta_grid_lo), opt.beta_grid_hi);
  const double lo = opt.beta_zero_guard;
  const int steps = 36;
  const double ratio = std::pow(hi / lo, 1.0 / steps);
  std::vector<double> mags;
  double v = lo;
  for (int i = 0; i <= steps; ++i, v *= ratio) mags.push_back(v);
  for (auto it = mags.rbegin(); it != mags.rend(); ++it)
    if (-*it >= opt.beta_grid_lo) g.push_back(-*it);
  for (double m : mags)
    if (m <= opt.beta_grid_hi) g.push_back(m);
  return g;
}

// All bracketed roots of f on the grid, polished by bisection; roots whose
// residual stays large (poles) are dropped.
template <class F>
std::vector<double> grid_roots(F&& f, const std::vector<double>& grid,
                               const SolverConfig& cfg, double residual_scale) {
  std::vector<double> roots;
  double prev_x = 0, prev_f = std::numeric_limits<double>::quiet_NaN();
  for (double x : grid) {
    const double fx = f(x);
    // never bisect across the excluded neighbourhood of beta = 0
    if (std::isfinite(fx) && std::isfinite(prev_f) &&
        !(prev_x < 0 && x > 0)) {
      if (fx == 0) {
        roots.push_back(x);
      } else if (prev_f * fx < 0) {
        SolverConfig c = cfg;
        c.tol_f = cfg.tol_f * std::max(1.0, residual_scale);
        const double r = bisect(f, prev_x, x, c);
        if (std::abs(f(r)) <= 1e-6 * std::max(1.0, residual_scale))
          roots.push_back(r);
      }
    }
    prev_x = x;
    prev_f = fx;
  }
  return roots;
}

// ---- candidates and the scan ---------------------------------------------------

struct Candidate {
  double loglik = kNegInf;
  FamilyParams params{};
  std::size_t j = 0;
  bool boundary = true;
  int sub = 0;
  bool valid = false;
};

// strict total order; the lexicographic tiebreak keeps parallel reductions
// independent of evaluation order
bool better(const Candidate& a, const Candidate& b) {
  if (!a.valid || !b.valid) return a.valid;
  if (a.loglik != b.loglik) return a.loglik > b.loglik;
  if (a.boundary != b.boundary) return a.boundary;
  if (a.j != b.j) return a.j < b.j;
  return a.sub < b.sub;
}

struct ScanContext {
  const SortedSample* s = nullptr;
  Family family = Family::uni;
  std::optional<double> beta;  // pinned or profile beta
  const FitOptions* opt = nullptr;
  const detail::AlgCoreSeries* series = nullptr;  // for alg scans
  bool boundary_only = false;
  std::size_t interior_nm_iter = 32;
};

double alg_loglik(const ScanContext& cx, const FamilyParams& p,
                  const SplitStats& st) {
  double mean_core_term = 0;
  if (st.n_core > 0) {
    if (cx.series && cx.series->beta() == (family_is_forced(p.family) ? p.alpha : p.beta))
      mean_core_term =
          cx.series->log_core_sum(st.n_core, p.x_min) / as_d(st.n_core);
    else
      mean_core_term = alg_core_mean(*cx.s, family_is_forced(p.family) ? p.alpha : p.beta, p.x_min);
  }
  return log_likelihood(p, st, mean_core_term);
}

double candidate_loglik(const ScanContext& cx, const FamilyParams& p,
                        const SplitStats& st) {
  if (p.family == Family::alg || p.family == Family::forced_alg)
    return alg_loglik(cx, p, st);
  return log_likelihood(p, st);
}

void push(std::vector<Candidate>& out, const ScanContext& cx,
          const FamilyParams& p, const SplitStats& st, std::size_t j,
          bool boundary, int sub) {
  if (!is_valid(p)) return;
  const double ll = candidate_loglik(cx, p, st);
  if (!std::isfinite(ll)) return;
  out.push_back(Candidate{ll, p, j, boundary, sub, true});
}

// boundary candidate: x_min pinned at iv.lo, remaining parameters fitted
void boundary_candidate(const ScanContext& cx, const SortedSample::Interval& iv,
                        std::vector<Candidate>& out) {
  const SplitStats& st = iv.stats;
  const double xm = iv.lo;
  const double lxm = std::log(xm);
  if (st.n_tail == 0) return;
  const SolverConfig& cfg = cx.opt->solver;
  const double n = as_d(st.n);
  switch (cx.family) {
    case Family::uni: {
      push(out, cx, uni_params(uni_alpha_hat(st, lxm), xm), st, iv.index, true, 0);
      return;
    }
    case Family::pow: {
      if (cx.beta) {
        push(out, cx,
             general_params(Family::pow, pow_alpha_hat_fixed(st, lxm, *cx.beta),
                            *cx.beta, xm),
             st, iv.index, true, 0);
        return;
      }
      if (st.n_core == 0 || lxm - st.mean_ln_core <= 0) return;
      const auto bhats = pow_beta_hats(st, lxm);
      int sub = 0;
      for (double b : bhats) {
        ++sub;
        if (!std::isfinite(b) || b <= -1) continue;
        push(out, cx,
             general_params(Family::pow, pow_alpha_hat_fixed(st, lxm, b), b, xm),
             st, iv.index, true, sub);
      }
      return;
    }
    case Family::exp: {
      if (cx.beta) {
        const double a = exp_alpha_hat_fixed(st, lxm, *cx.beta);
        push(out, cx, general_params(Family::exp, a, *cx.beta, xm), st, iv.index,
             true, 0);
        return;
      }
      if (st.n_core == 0) return;
      auto g = [&](double b) {
        return exp_dldb(st, xm, exp_alpha_hat_fixed(st, lxm, b), b);
      };
      int sub = 0;
      for (double b : grid_roots(g, beta_grid(*cx.opt), cfg, n)) {
        ++sub;
        const double a = exp_alpha_hat_fixed(st, lxm, b);
        if (b == a) continue;
        push(out, cx, general_params(Family::exp, a, b, xm), st, iv.index, true,
             sub);
      }
      return;
    }
    case Family::alg: {
      if (!cx.beta) return;  // profile search supplies beta
      const double lambda = as_d(st.n_tail) / n * (st.mean_ln_tail - lxm);
      const double a = alg_alpha_hat(lambda, *cx.beta);
      push(out, cx, general_params(Family::alg, a, *cx.beta, xm), st, iv.index,
           true, 0);
      return;
    }
    case Family::forced_pow: {
      const double ll = st.mean_ln_tail - lxm;
      const double init = ll > 0 ? 1 + 1 / ll : 2.0;
      try {
        const double a = solve_alpha_root(
            [&](double x) { return fpow_score(st, lxm, x); },
            [&](double x) { return fpow_score_deriv(st, x); }, init, cfg, n);
        push(out, cx, forced_params(Family::forced_pow, a, xm), st, iv.index,
             true, 0);
      } catch (const NoSolutionInRange&) {
      }
      return;
    }
    case Family::forced_exp: {
      const double ll = st.mean_ln_tail - lxm;
      const double init = ll > 0 ? 1 + 1 / ll : 2.0;
      try {
        const double a = solve_alpha_root(
            [&](double x) { return fexp_score(st, xm, x); },
            [&](double x) { return fexp_score_deriv(st, x); }, init, cfg, n);
        push(out, cx, forced_params(Family::forced_exp, a, xm), st, iv.index,
             true, 0);
      } catch (const NoSolutionInRange&) {
      }
      return;
    }
    case Family::forced_alg: {
      const double ll = st.mean_ln_tail - lxm;
      const double init = ll > 0 ? 1 + 1 / ll : 2.0;
      try {
        const double a = solve_alpha_root(
            [&](double x) { return falg_score(*cx.s, st, lxm, x); },
            [&](double x) { return falg_score_deriv(*cx.s, st, lxm, x); }, init,
            cfg, n);
        push(out, cx, forced_params(Family::forced_alg, a, xm), st, iv.index,
             true, 0);
      } catch (const NoSolutionInRange&) {
      }
      return;
    }
  }
}

// interior candidates: stationary points with x_min inside [iv.lo, iv.hi)
void interior_candidates_impl(const ScanContext& cx,
                              const SortedSample::Interval& iv,
                              std::vector<Candidate>& out) {
  const SplitStats& st = iv.stats;
  const SolverConfig& cfg = cx.opt->solver;
  const double n = as_d(st.n);
  if (st.n_tail == 0) return;
  switch (cx.family) {
    case Family::uni:
      return;  // the interior stationary pair is a saddle point
    case Family::pow: {
      if (st.n_core == 0) return;
      const double delta = st.mean_ln_tail - st.mean_ln_core;
      if (!(delta > 0)) return;
      const double b =
          cx.beta ? *cx.beta : -1 + n / (as_d(st.n_core) * delta);
      if (!(std::isfinite(b) && b > -1)) return;
      const double a = (n * (b + 1) - b * as_d(st.n_tail)) / as_d(st.n_tail);
      if (!(a > 1)) return;
      const double x_hat =
          std::exp(st.mean_ln_tail - as_d(st.n_tail) / ((b + 1) * as_d(st.n_core)));
      if (!(x_hat >= iv.lo && x_hat < iv.hi)) return;
      push(out, cx, general_params(Family::pow, a, b, x_hat), st, iv.index,
           false, 1);
      return;
    }
    case Family::forced_pow: {
      if (st.n_core == 0 || st.n_tail <= st.n_core) return;
      const double a = n / (as_d(st.n_tail) - as_d(st.n_core));
      if (!(a > 1)) return;
      const double lx = 1 - n * n / (2 * as_d(st.n_tail) * as_d(st.n_core)) +
                        (as_d(st.n_core) * st.mean_ln_core -
                         as_d(st.n_tail) * st.mean_ln_tail) /
                            (as_d(st.n_core) - as_d(st.n_tail));
      const double x_hat = std::exp(lx);
      if (!(x_hat >= iv.lo && x_hat < iv.hi)) return;
      push(out, cx, forced_params(Family::forced_pow, a, x_hat), st, iv.index,
           false, 1);
      return;
    }
    case Family::exp: {
      if (st.n_core == 0) return;
      auto emit = [&](double b, int sub) {
        const double a = exp_interior_alpha(st, b);
        const double x_hat = exp_interior_xmin(st, b);
        if (!(a > 1) || b == a) return;
        if (!(x_hat >= iv.lo && x_hat < iv.hi)) return;
        push(out, cx, general_params(Family::exp, a, b, x_hat), st, iv.index,
             false, sub);
      };
      if (cx.beta) {
        emit(*cx.beta, 1);
        return;
      }
      auto z = [&](double b) { return exp_interior_zfun(st, b); };
      int sub = 0;
      for (double b : grid_roots(z, beta_grid(*cx.opt), cfg, n)) emit(b, ++sub);
      return;
    }
    case Family::forced_exp: {
      if (st.n_core == 0) return;
      auto alpha_at = [&](double xm) {
        return n * xm /
               (as_d(st.n_tail) * xm + as_d(st.n_core) * st.mean_core);
      };
      auto g = [&](double xm) { return fexp_score(st, xm, alpha_at(xm)); };
      const double glo = g(iv.lo), ghi = g(iv.hi);
      if (!(std::isfinite(glo) && std::isfinite(ghi)) || glo * ghi >= 0) return;
      SolverConfig c = cfg;
      c.tol_f = cfg.tol_f * std::max(1.0, n);
      const double x_hat = bisect(g, iv.lo, iv.hi, c);
      const double a = alpha_at(x_hat);
      if (!(a > 1) || !(x_hat >= iv.lo && x_hat < iv.hi)) return;
      push(out, cx, forced_params(Family::forced_exp, a, x_hat), st, iv.index,
           false, 1);
      return;
    }
    case Family::alg: {
      if (!cx.beta || st.n_core == 0) return;
      const double b = *cx.beta;
      auto ratio_sum = [&](double xm) {
        if (cx.series && cx.series->beta() == b)
          return cx.series->ratio_sum(st.n_core, xm);
        double sum = 0;
        const double lxm = std::log(xm);
        const double* lv = cx.s->ln_values().data();
        for (std::size_t i = 0; i < st.n_core; ++i) {
          const double u = std::exp(b * (lv[i] - lxm));
          sum += u / (2 - u);
        }
        return sum;
      };
      auto psi = [&](double xm) {
        const double lambda =
            as_d(st.n_tail) / n * (st.mean_ln_tail - std::log(xm));
        return b * ratio_sum(xm) - n + alg_alpha_hat(lambda, b) * as_d(st.n_tail);
      };
      const double plo = psi(iv.lo), phi = psi(iv.hi);
      if (!(std::isfinite(plo) && std::isfinite(phi)) || plo * phi >= 0) return;
      SolverConfig c = cfg;
      c.tol_f = cfg.tol_f * std::max(1.0, n);
      const double x_hat = bisect(psi, iv.lo, iv.hi, c);
      const double lambda =
          as_d(st.n_tail) / n * (st.mean_ln_tail - std::log(x_hat));
      const double a = alg_alpha_hat(lambda, b);
      if (!(a > 1) || !(x_hat >= iv.lo && x_hat < iv.hi)) return;
      push(out, cx, general_params(Family::alg, a, b, x_hat), st, iv.index,
           false, 1);
      return;
    }
    case Family::forced_alg: {
      if (st.n_core == 0) return;
      const double lo = iv.lo, hi = iv.hi;
      auto profile = [&](double xm) -> double {
        const double lxm = std::log(xm);
        const double ll = st.mean_ln_tail - lxm;
        const double init = ll > 0 ? 1 + 1 / ll : 2.0;
        try {
          const double a = solve_alpha_root(
              [&](double x) { return falg_score(*cx.s, st, lxm, x); },
              [&](double x) { return falg_score_deriv(*cx.s, st, lxm, x); },
              init, cx.opt->solver, n);
          const FamilyParams p = forced_params(Family::forced_alg, a, xm);
          return alg_loglik(cx, p, st);
        } catch (const NoSolutionInRange&) {
          return kNegInf;
        }
      };
      SolverConfig c = cfg;
      c.max_iter = static_cast<int>(cx.interior_nm_iter);
      const double x_hat = nelder_mead_1d(
          [&](double xm) { return -profile(xm); }, 0.5 * (lo + hi),
          0.25 * (hi - lo), c, lo, hi);
      if (!(x_hat >= lo && x_hat < hi)) return;
      const double lxm = std::log(x_hat);
      const double ll = st.mean_ln_tail - lxm;
      try {
        const double a = solve_alpha_root(
            [&](double x) { return falg_score(*cx.s, st, lxm, x); },
            [&](double x) { return falg_score_deriv(*cx.s, st, lxm, x); },
            ll > 0 ? 1 + 1 / ll : 2.0, cx.opt->solver, n);
        push(out, cx, forced_params(Family::forced_alg, a, x_hat), st, iv.index,
             false, 1);
      } catch (const NoSolutionInRange&) {
      }
      return;
    }
    default:
      return;
  }
}

void interval_candidates(const ScanContext& cx, std::size_t j,
                         std::vector<Candidate>& out) {
  const SortedSample::Interval iv = cx.s->interval(j);
  boundary_candidate(cx, iv, out);
  if (!cx.boundary_only) interior_candidates_impl(cx, iv, out);
}

struct ScanOutcome {
  Candidate best;
  Candidate best_boundary;
  void absorb(const Candidate& c) {
    if (better(c, best)) best = c;
    if (c.boundary && better(c, best_boundary)) best_boundary = c;
  }
  void absorb(const ScanOutcome& o) {
    if (better(o.best, best)) best = o.best;
    if (better(o.best_boundary, best_boundary)) best_boundary = o.best_boundary;
  }
};

ScanOutcome scan_ids(const ScanContext& cx, const std::vector<std::size_t>& ids) {
  ScanOutcome total;
#ifdef _OPENMP
  if (cx.opt->parallel) {
#pragma omp parallel
    {
      ScanOutcome local;
      std::vector<Candidate> buf;
#pragma omp for schedule(dynamic, 16) nowait
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(ids.size());
           ++k) {
        buf.clear();
        interval_candidates(cx, ids[static_cast<std::size_t>(k)], buf);
        for (const Candidate& c : buf) local.absorb(c);
      }
#pragma omp critical(coretail_scan_merge)
      total.absorb(local);
    }
    return total;
  }
#endif
  std::vector<Candidate> buf;
  for (std::size_t id : ids) {
    buf.clear();
    interval_candidates(cx, id, buf);
    for (const Candidate& c : buf) total.absorb(c);
  }
  return total;
}

std::vector<std::size_t> all_ids(const SortedSample& s) {
  std::vector<std::size_t> ids(s.interval_count());
  for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = j + 1;
  return ids;
}

// per-id boundary logliks, for ranking coarse passes of the budgeted scan
std::vector<std::pair<double, std::size_t>> rank_boundary(
    const ScanContext& cx0, const std::vector<std::size_t>& ids) {
  ScanContext cx = cx0;
  cx.boundary_only = true;
  std::vector<std::pair<double, std::size_t>> scores(ids.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (cx.opt->parallel)
#endif
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(ids.size()); ++k) {
    std::vector<Candidate> buf;
    interval_candidates(cx, ids[static_cast<std::size_t>(k)], buf);
    double best = kNegInf;
    for (const Candidate& c : buf) best = std::max(best, c.loglik);
    scores[static_cast<std::size_t>(k)] = {best, ids[static_cast<std::size_t>(k)]};
  }
  return scores;
}

std::vector<std::size_t> stride_ids(std::size_t lo, std::size_t hi,
                                    std::size_t count) {
  std::vector<std::size_t> out;
  if (hi < lo) return out;
  const std::size_t span = hi - lo + 1;
  if (span <= count) {
    for (std::size_t j = lo; j <= hi; ++j) out.push_back(j);
    return out;
  }
  const std::size_t stride = (span + count - 1) / count;
  for (std::size_t j = lo; j <= hi; j += stride) out.push_back(j);
  if (out.back() != hi) out.push_back(hi);
  return out;
}

// Coarse-to-fine scan for families whose per-candidate cost grows with n
// (forced-alg). Boundary candidates rank stride subsets; the best regions are
// refined down to contiguous windows that get the full treatment.
ScanOutcome scan_budgeted(const ScanContext& cx) {
  const std::size_t m1 = cx.s->interval_count();
  ScanOutcome total;

  auto ids1 = stride_ids(1, m1, 384);
  auto scores1 = rank_boundary(cx, ids1);
  auto top = [&](std::vector<std::pair<double, std::size_t>> sc, std::size_t k) {
    std::sort(sc.begin(), sc.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (sc.size() > k) sc.resize(k);
    return sc;
  };
  const std::size_t stride1 = std::max<std::size_t>(1, m1 / 384);

  std::vector<std::size_t> ids2;
  for (const auto& [ll, j] : top(scores1, 3)) {
    (void)ll;
    const std::size_t lo = j > stride1 ? j - stride1 : 1;
    const std::size_t hi = std::min(m1, j + stride1);
    for (std::size_t v : stride_ids(lo, hi, 96)) ids2.push_back(v);
  }
  std::sort(ids2.begin(), ids2.end());
  ids2.erase(std::unique(ids2.begin(), ids2.end()), ids2.end());
  auto scores2 = rank_boundary(cx, ids2);
  const std::size_t stride2 = std::max<std::size_t>(1, 2 * stride1 / 96);

  std::vector<std::size_t> ids3;
  for (const auto& [ll, j] : top(scores2, 3)) {
    (void)ll;
    const std::size_t lo = j > stride2 ? j - stride2 : 1;
    const std::size_t hi = std::min(m1, j + stride2);
    for (std::size_t v = lo; v <= hi; ++v) ids3.push_back(v);
  }
  std::sort(ids3.begin(), ids3.end());
  ids3.erase(std::unique(ids3.begin(), ids3.end()), ids3.end());

  ScanContext cx3 = cx;
  cx3.interior_nm_iter = 16;
  total.absorb(scan_ids(cx3, ids3));

  // boundary candidates seen during ranking still compete for the maximum
  ScanContext cxb = cx;
  cxb.boundary_only = true;
  std::vector<std::size_t> seen = ids1;
  seen.insert(seen.end(), ids2.begin(), ids2.end());
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  total.absorb(scan_ids(cxb, seen));
  return total;
}

FitResult finish(const SortedSample& s, const ScanOutcome& out,
                 const std::string& notes) {
  if (!out.best.valid)
    throw NoValidFit("no candidate satisfied the parameter constraints");
  Candidate win = out.best;
  // ties between interior and boundary candidates go to the boundary
  if (!win.boundary && out.best_boundary.valid &&
      out.best_boundary.loglik >=
          win.loglik - 1e-12 * (1 + std::abs(win.loglik)))
    win = out.best_boundary;
  FitResult r;
  r.params = win.params;
  r.loglik = win.loglik;
  r.n = s.size();
  r.interval_index = static_cast<std::ptrdiff_t>(win.j);
  r.at_boundary = win.boundary;
  r.branch_notes = notes;
  return r;
}

void check_pinned_beta(Family f, const FitOptions& opt) {
  if (!opt.pinned_beta) return;
  if (!family_has_free_beta(f))
    throw InvalidParams(std::string(family_name(f)) +
                        " family has no free beta to pin");
  const double b = *opt.pinned_beta;
  if (!(std::isfinite(b)) || std::abs(b) > 600)
    throw InvalidParams("pinned beta must be finite with |beta| <= 600");
  if (f == Family::pow && !(b > -1))
    throw InvalidParams("pow family requires beta > -1");
  if (f == Family::exp && std::abs(b) < 1e-8)
    throw InvalidParams("exp family requires |beta| >= 1e-8");
  if (f == Family::alg && !(b > 0))
    throw InvalidParams("alg family requires beta > 0");
}

}  // namespace

// ---- public estimator operations ---------------------------------------------

double fit_alpha(Family f, const SplitStats& st, double x_min, double beta,
                 const SolverConfig& cfg) {
  if (!(x_min > 0)) throw InvalidParams("fit_alpha requires x_min > 0");
  if (st.n_tail == 0) throw NoTailData("no observations above x_min");
  const double lxm = std::log(x_min);
  if (!(st.mean_ln_tail - lxm > 0))
    throw NoTailData("tail log-average not above ln x_min");
  double a = 0;
  switch (f) {
    case Family::uni:
      a = uni_alpha_hat(st, lxm);
      break;
    case Family::pow:
      a = pow_alpha_hat_fixed(st, lxm, beta);
      break;
    case Family::exp:
      a = exp_alpha_hat_fixed(st, lxm, beta);
      break;
    case Family::forced_pow: {
      const double init = 1 + 1 / (st.mean_ln_tail - lxm);
      a = solve_alpha_root([&](double x) { return fpow_score(st, lxm, x); },
                           [&](double x) { return fpow_score_deriv(st, x); },
                           init, cfg, as_d(st.n));
      break;
    }
    case Family::forced_exp: {
      const double init = 1 + 1 / (st.mean_ln_tail - lxm);
      a = solve_alpha_root([&](double x) { return fexp_score(st, x_min, x); },
                           [&](double x) { return fexp_score_deriv(st, x); },
                           init, cfg, as_d(st.n));
      break;
    }
    case Family::alg: {
      const double lambda =
          as_d(st.n_tail) / as_d(st.n) * (st.mean_ln_tail - lxm);
      a = alg_alpha_hat(lambda, beta);
      break;
    }
    case Family::forced_alg:
      throw InvalidParams(
          "forced-alg alpha estimation needs the observations; use the sample "
          "overload");
  }
  if (!(a > 1)) throw NoSolutionInRange("stationary alpha not above 1");
  return a;
}

double fit_alpha(Family f, const SortedSample& s, double x_min, double beta,
                 const SolverConfig& cfg) {
  const SplitStats st = s.split_at(x_min);
  if (f != Family::forced_alg) return fit_alpha(f, st, x_min, beta, cfg);
  if (st.n_tail == 0) throw NoTailData("no observations above x_min");
  const double lxm = std::log(x_min);
  const double init = 1 + 1 / (st.mean_ln_tail - lxm);
  const double a = solve_alpha_root(
      [&](double x) { return falg_score(s, st, lxm, x); },
      [&](double x) { return falg_score_deriv(s, st, lxm, x); }, init, cfg,
      as_d(st.n));
  if (!(a > 1)) throw NoSolutionInRange("stationary alpha not above 1");
  return a;
}

std::pair<double, double> fit_beta(Family f, const SortedSample& s,
                                   double x_min, const SolverConfig& cfg) {
  if (!family_has_free_beta(f))
    throw InvalidParams(std::string(family_name(f)) + " family has no free beta");
  const SplitStats st = s.split_at(x_min);
  if (st.n_tail == 0) throw NoTailData("no observations above x_min");
  if (st.n_core == 0) throw NoValidBeta("no core observations below x_min");
  const double lxm = std::log(x_min);
  FitOptions opt;
  opt.solver = cfg;

  if (f == Family::pow) {
    if (!(lxm - st.mean_ln_core > 0))
      throw NoValidBeta("core log-average equals ln x_min");
    double best_ll = kNegInf, best_a = 0, best_b = 0;
    for (double b : pow_beta_hats(st, lxm)) {
      if (!std::isfinite(b) || b <= -1) continue;
      const double a = pow_alpha_hat_fixed(st, lxm, b);
      const FamilyParams p = general_params(Family::pow, a, b, x_min);
      if (!is_valid(p)) continue;
      const double ll = log_likelihood(p, st);
      if (ll > best_ll) {
        best_ll = ll;
        best_a = a;
        best_b = b;
      }
    }
    if (best_ll == kNegInf)
      throw NoValidBeta("both stationary betas violate beta > -1");
    return {best_a, best_b};
  }

  if (f == Family::exp) {
    auto g = [&](double b) {
      return exp_dldb(st, x_min, exp_alpha_hat_fixed(st, lxm, b), b);
    };
    double best_ll = kNegInf, best_a = 0, best_b = 0;
    for (double b : grid_roots(g, beta_grid(opt), cfg, as_d(st.n))) {
      const double a = exp_alpha_hat_fixed(st, lxm, b);
      const FamilyParams p = general_params(Family::exp, a, b, x_min);
      if (!is_valid(p)) continue;
      const double ll = log_likelihood(p, st);
      if (ll > best_ll) {
        best_ll = ll;
        best_a = a;
        best_b = b;
      }
    }
    if (best_ll == kNegInf)
      throw NoValidBeta("no admissible stationary beta on the search grid");
    return {best_a, best_b};
  }

  // alg: profile over beta by simplex around the best grid probe
  auto profile = [&](double b) -> double {
    const double lambda = as_d(st.n_tail) / as_d(st.n) * (st.mean_ln_tail - lxm);
    const double a = alg_alpha_hat(lambda, b);
    const FamilyParams p = general_params(Family::alg, a, b, x_min);
    if (!is_valid(p)) return kNegInf;
    return log_likelihood(p, st, alg_core_mean(s, b, x_min));
  };
  const double probes[] = {1e-3, 5e-3, 0.02, 0.05, 0.1, 0.2, 0.5,
                           1,    2,    4,    8,    16,  32,  64};
  double best_b = probes[0], best_ll = kNegInf;
  for (double b : probes) {
    const double ll = profile(b);
    if (ll > best_ll) {
      best_ll = ll;
      best_b = b;
    }
  }
  SolverConfig nm = cfg;
  nm.max_iter = 80;
  const double bhat = nelder_mead_1d([&](double b) { return -profile(b); },
                                     best_b, 0.5 * best_b, nm, 1e-6, 1e3);
  const double lambda = as_d(st.n_tail) / as_d(st.n) * (st.mean_ln_tail - lxm);
  return {alg_alpha_hat(lambda, bhat), bhat};
}

std::vector<InteriorCandidate> interior_candidates(
    Family f, const SortedSample& s, const SortedSample::Interval& iv,
    std::optional<double> beta, const SolverConfig& cfg,
    std::size_t max_nm_iter) {
  if (f == Family::alg && !beta)
    throw InvalidParams("alg interior candidates solve at a fixed beta");
  FitOptions opt;
  opt.solver = cfg;
  ScanContext cx;
  cx.s = &s;
  cx.family = f;
  cx.beta = beta;
  cx.opt = &opt;
  cx.interior_nm_iter = max_nm_iter;
  std::vector<Candidate> buf;
  interior_candidates_impl(cx, iv, buf);
  std::vector<InteriorCandidate> out;
  for (const Candidate& c : buf)
    out.push_back(InteriorCandidate{c.params, c.loglik});
  return out;
}

FitResult fit(Family f, const SortedSample& s, const FitOptions& opt) {
  if (s.interval_count() < 1)
    throw NoValidFit("need at least 2 distinct observation values");
  check_pinned_beta(f, opt);

  ScanContext cx;
  cx.s = &s;
  cx.family = f;
  cx.beta = opt.pinned_beta;
  cx.opt = &opt;

  const auto ids = all_ids(s);

  if (f == Family::alg && !opt.pinned_beta) {
    // profile over beta: each evaluation is a full scan at that beta
    auto profile_scan = [&](double b) {
      detail::AlgCoreSeries series(s, b);
      ScanContext c = cx;
      c.beta = b;
      c.series = &series;
      return scan_ids(c, ids);
    };
    auto profile = [&](double b) {
      const ScanOutcome o = profile_scan(b);
      return o.best.valid ? o.best.loglik : kNegInf;
    };
    const double probes[] = {1e-3, 0.01, 0.05, 0.2, 0.8, 3, 12, 48};
    double best_b = probes[0], best_ll = kNegInf;
    for (double b : probes) {
      const double ll = profile(b);
      if (ll > best_ll) {
        best_ll = ll;
        best_b = b;
      }
    }
    SolverConfig nm = opt.solver;
    nm.max_iter = 48;
    nm.tol_x = 1e-6;
    const double bhat =
        nelder_mead_1d([&](double b) { return -profile(b); }, best_b,
                       0.5 * best_b, nm, opt.alg_beta_lo, opt.alg_beta_hi);
    return finish(s, profile_scan(bhat), "profile over beta, simplex refine");
  }

  if (f == Family::alg) {
    std::unique_ptr<detail::AlgCoreSeries> series;
    ScanContext c = cx;
    if (*opt.pinned_beta <= 2000) {
      series = std::make_unique<detail::AlgCoreSeries>(s, *opt.pinned_beta);
      c.series = series.get();
    }
    return finish(s, scan_ids(c, ids), "pinned beta");
  }

  if (f == Family::forced_alg && ids.size() > opt.scan_budget)
    return finish(s, scan_budgeted(cx), "coarse-to-fine interval subset");

  return finish(s, scan_ids(cx, ids), "");
}

FitResult fit_fixed_xmin(Family f, const SortedSample& s, double x_min,
                         const FitOptions& opt) {
  if (!(std::isfinite(x_min) && x_min > 0))
    throw InvalidParams("x_min must be positive");
  if (s.interval_count() < 1)
    throw NoValidFit("need at least 2 distinct observation values");
  check_pinned_beta(f, opt);
  const SplitStats st = s.split_at(x_min);
  FamilyParams p;
  try {
    if (f == Family::uni) {
      p = uni_params(fit_alpha(f, st, x_min, 0, opt.solver), x_min);
    } else if (family_is_forced(f)) {
      p = forced_params(f, fit_alpha(f, s, x_min, 0, opt.solver), x_min);
    } else if (opt.pinned_beta) {
      p = general_params(
          f, fit_alpha(f, st, x_min, *opt.pinned_beta, opt.solver),
          *opt.pinned_beta, x_min);
    } else {
      const auto [a, b] = fit_beta(f, s, x_min, opt.solver);
      p = general_params(f, a, b, x_min);
    }
    validate(p);
  } catch (const Error& e) {
    throw NoValidFit("no valid fit at pinned x_min: " + std::string(e.what()));
  }
  FitResult r;
  r.params = p;
  r.loglik = log_likelihood(p, s);
  r.n = s.size();
  const auto& y = s.uniques();
  r.interval_index = static_cast<std::ptrdiff_t>(s.count_at_most(x_min) == 0
      ? 0
      : std::upper_bound(y.begin(), y.end(), x_min) - y.begin());
  r.at_boundary = std::binary_search(y.begin(), y.end(), x_min);
  r.branch_notes = "pinned x_min";
  return r;
}

double aic(const FitResult& r) {
  return 2.0 * family_param_count(r.params.family) - 2.0 * r.loglik;
}

double bic(const FitResult& r) {
  return family_param_count(r.params.family) * std::log(as_d(r.n)) -
         2.0 * r.loglik;
}

}  // namespace coretail
