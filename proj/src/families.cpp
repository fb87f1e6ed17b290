#include "coretail/families.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "coretail/rng.hpp"
#include "coretail/solvers.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coretail {

namespace {

enum class Core { uni, pow, exp_like, alg };

Core core_of(Family f) {
  switch (f) {
    case Family::uni:
      return Core::uni;
    case Family::pow:
    case Family::forced_pow:
      return Core::pow;
    case Family::exp:
    case Family::forced_exp:
      return Core::exp_like;
    case Family::alg:
    case Family::forced_alg:
      return Core::alg;
  }
  return Core::uni;
}

double effective_beta(const FamilyParams& p) {
  if (p.family == Family::uni) return 0.0;
  return family_is_forced(p.family) ? p.alpha : p.beta;
}

std::string msg_for(const FamilyParams& p, const std::string& what) {
  return std::string(family_name(p.family)) + " family requires " + what;
}

// ---- stable building blocks for the exponential core -----------------------
// D(a, b) = (a-1)(e^b - 1) + b carries the sign of b; everything below is
// arranged so nothing overflows before b ~ 1e300.

// ln |D|
double exp_log_abs_denom(double a, double b) {
  if (b > 0)
    return b + std::log((a - 1) * (-std::expm1(-b)) + b * std::exp(-b));
  return std::log((a - 1) * (-std::expm1(b)) - b);
}

// b / D, positive for all valid b
double exp_b_over_denom(double a, double b) {
  if (b > 300) {
    const double s = std::exp(-b);
    return b * s / ((a - 1) * (1 - s) + b * s);
  }
  return b / ((a - 1) * std::expm1(b) + b);
}

// (e^b - 1 - b) / b^2, series for small |b|
double exp_m1_core(double b) {
  if (std::abs(b) < 0.5) {
    double term = 0.5, sum = 0.5;  // sum_k b^k/(k+2)!
    for (int k = 1; k < 22; ++k) {
      term *= b / (k + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(b) - b) / (b * b);
}

// (2 e^b - 2 - 2b - b^2) / b^3, series for small |b|
double exp_m2_core(double b) {
  if (std::abs(b) < 0.5) {
    double term = 1.0 / 3.0, sum = term;  // sum_k 2 b^k/(k+3)!
    for (int k = 1; k < 22; ++k) {
      term *= b / (k + 3);
      sum += term;
    }
    return sum;
  }
  return (2 * (std::expm1(b) - b) - b * b) / (b * b * b);
}

// (e^b - 1 - b) / D
double exp_em1b_over_denom(double a, double b) {
  if (b > 300) {
    const double s = std::exp(-b);
    return (1 - (1 + b) * s) / ((a - 1) * (1 - s) + b * s);
  }
  const double denom = (a - 1) * std::expm1(b) + b;
  return exp_m1_core(b) * b * b / denom;
}

// (2 e^b - 2 - 2b - b^2) / D
double exp_m2num_over_denom(double a, double b) {
  if (b > 300) {
    const double s = std::exp(-b);
    return (2 - (b * b + 2 * b + 2) * s) / ((a - 1) * (1 - s) + b * s);
  }
  const double denom = (a - 1) * std::expm1(b) + b;
  return exp_m2_core(b) * b * b * b / denom;
}

// core cdf of the exp family at z = x/x_min <= 1
double exp_cdf_core(double a, double b, double z) {
  if (b > 0) {
    if (b <= 300) {
      const double denom = (a - 1) * std::expm1(b) + b;
      return (a - 1) * std::exp(b) * (-std::expm1(-b * z)) / denom;
    }
    const double s = std::exp(-b);
    return (a - 1) * (-std::expm1(-b * z)) / ((a - 1) * (1 - s) + b * s);
  }
  if (b >= -300) {
    const double abs_denom = (a - 1) * (-std::expm1(b)) - b;
    return (a - 1) * std::exp(b) * std::expm1(-b * z) / abs_denom;
  }
  const double ln_u = (-b * z > 36) ? -b * z + std::log1p(-std::exp(b * z))
                                    : std::log(std::expm1(-b * z));
  return std::exp(std::log(a - 1) + b + ln_u - exp_log_abs_denom(a, b));
}

// inverse of exp_cdf_core, returns z = x/x_min
double exp_icdf_core(double a, double b, double q) {
  if (b >= -300) {
    // K = D e^{-b}/(a-1) = (1 - e^{-b}) + b e^{-b}/(a-1)
    const double K = -std::expm1(-b) + b * std::exp(-b) / (a - 1);
    return -std::log1p(-q * K) / b;
  }
  return 1.0 - std::log(q * (a - 1 - b) / (a - 1) + (1 - q) * std::exp(b)) / b;
}

double alg_tail_denom(double a, double b) { return 2 * a * b + a - b; }

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::uni:
      return "uni";
    case Family::pow:
      return "pow";
    case Family::forced_pow:
      return "forced-pow";
    case Family::exp:
      return "exp";
    case Family::forced_exp:
      return "forced-exp";
    case Family::alg:
      return "alg";
    case Family::forced_alg:
      return "forced-alg";
  }
  return "?";
}

std::optional<Family> family_from_name(std::string_view name) {
  for (Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  return std::nullopt;
}

bool family_is_forced(Family f) {
  return f == Family::forced_pow || f == Family::forced_exp ||
         f == Family::forced_alg;
}

bool family_has_free_beta(Family f) {
  return f == Family::pow || f == Family::exp || f == Family::alg;
}

int family_param_count(Family f) { return family_has_free_beta(f) ? 3 : 2; }

FamilyParams uni_params(double alpha, double x_min) {
  return FamilyParams{Family::uni, alpha, 0.0, x_min};
}

FamilyParams forced_params(Family f, double alpha, double x_min) {
  if (!family_is_forced(f))
    throw InvalidParams("forced_params: " + std::string(family_name(f)) +
                        " is not a forced family");
  return FamilyParams{f, alpha, alpha, x_min};
}

FamilyParams general_params(Family f, double alpha, double beta, double x_min) {
  if (!family_has_free_beta(f))
    throw InvalidParams("general_params: " + std::string(family_name(f)) +
                        " has no free beta");
  return FamilyParams{f, alpha, beta, x_min};
}

FamilyParams make_params(Family f, double alpha, std::optional<double> beta,
                         double x_min) {
  if (f == Family::uni) {
    if (beta)
      throw InvalidParams("uni family takes no beta");
    return uni_params(alpha, x_min);
  }
  if (family_is_forced(f)) {
    if (beta && *beta != alpha)
      throw InvalidParams(msg_for({f, alpha, *beta, x_min}, "beta = alpha"));
    return forced_params(f, alpha, x_min);
  }
  if (!beta)
    throw InvalidParams(std::string(family_name(f)) + " family requires beta");
  return general_params(f, alpha, *beta, x_min);
}

void validate(const FamilyParams& p) {
  if (!(std::isfinite(p.x_min) && p.x_min > 0))
    throw InvalidParams(msg_for(p, "x_min > 0, got " + std::to_string(p.x_min)));
  if (!(std::isfinite(p.alpha) && p.alpha > 1))
    throw InvalidParams(msg_for(p, "alpha > 1, got " + std::to_string(p.alpha)));
  switch (p.family) {
    case Family::uni:
      break;
    case Family::pow:
      if (!(std::isfinite(p.beta) && p.beta > -1))
        throw InvalidParams(msg_for(p, "beta > -1, got " + std::to_string(p.beta)));
      break;
    case Family::exp:
      if (!(std::isfinite(p.beta)) || std::abs(p.beta) < 1e-8)
        throw InvalidParams(msg_for(p, "|beta| >= 1e-8 (the family is undefined at "
                                       "beta = 0), got " + std::to_string(p.beta)));
      if (p.beta == p.alpha)
        throw InvalidParams(msg_for(p, "beta != alpha (use forced-exp for the "
                                       "beta = alpha case)"));
      break;
    case Family::alg:
      if (!(std::isfinite(p.beta) && p.beta > 0))
        throw InvalidParams(msg_for(p, "beta > 0, got " + std::to_string(p.beta)));
      break;
    case Family::forced_pow:
    case Family::forced_exp:
    case Family::forced_alg:
      if (p.beta != p.alpha)
        throw InvalidParams(msg_for(p, "stored beta equal to alpha"));
      break;
  }
}

bool is_valid(const FamilyParams& p) {
  try {
    validate(p);
    return true;
  } catch (const InvalidParams&) {
    return false;
  }
}

double log_normalization(const FamilyParams& p) {
  validate(p);
  const double a = p.alpha;
  const double b = effective_beta(p);
  const double lxm = std::log(p.x_min);
  switch (core_of(p.family)) {
    case Core::uni:
      return std::log(a - 1) - std::log(a) - lxm;
    case Core::pow:
      return std::log(a - 1) + std::log1p(b) - std::log(a + b) - lxm;
    case Core::exp_like:
      return std::log(a - 1) + std::log(std::abs(b)) - lxm -
             exp_log_abs_denom(a, b);
    case Core::alg:
      return std::log(a - 1) + std::log1p(b) - std::log(alg_tail_denom(a, b)) -
             lxm;
  }
  return 0;
}

double normalization(const FamilyParams& p) {
  return std::exp(log_normalization(p));
}

double log_pdf(const FamilyParams& p, double x) {
  const double lc = log_normalization(p);
  if (!(x >= 0))
    throw DomainError("pdf requires x >= 0");
  const double a = p.alpha;
  const double b = effective_beta(p);
  if (x > p.x_min) return lc + a * (std::log(p.x_min) - std::log(x));
  switch (core_of(p.family)) {
    case Core::uni:
      return lc;
    case Core::pow:
      if (x == 0) {
        if (b < 0)
          throw DomainError("pow core with beta < 0 is singular at x = 0");
        return b == 0 ? lc : -std::numeric_limits<double>::infinity();
      }
      return lc + b * (std::log(x) - std::log(p.x_min));
    case Core::exp_like:
      return lc - b * (x / p.x_min - 1);
    case Core::alg: {
      if (x == 0) return lc + std::log(2.0);
      const double t = b * (std::log(x) - std::log(p.x_min));
      return lc + std::log1p(-std::expm1(t));
    }
  }
  return lc;
}

double pdf(const FamilyParams& p, double x) { return std::exp(log_pdf(p, x)); }

double cdf(const FamilyParams& p, double x) {
  const double C = normalization(p);
  if (!(x >= 0))
    throw DomainError("cdf requires x >= 0");
  const double a = p.alpha;
  const double b = effective_beta(p);
  const double xm = p.x_min;
  if (x > xm) {
    const double t = std::pow(xm / x, a - 1);
    switch (core_of(p.family)) {
      case Core::uni:
        return 1 - t / a;
      case Core::pow:
        return 1 - (b + 1) / (a + b) * t;
      case Core::exp_like:
        return 1 - exp_b_over_denom(a, b) * t;
      case Core::alg:
        return 1 - (b + 1) / alg_tail_denom(a, b) * t;
    }
  }
  const double z = x / xm;
  switch (core_of(p.family)) {
    case Core::uni:
      return C * x;
    case Core::pow:
      return (a - 1) / (a + b) * std::pow(z, b + 1);
    case Core::exp_like:
      return exp_cdf_core(a, b, z);
    case Core::alg:
      return z * (2 * b + 2 - std::pow(z, b)) * (a - 1) / alg_tail_denom(a, b);
  }
  return 0;
}

double tail_mass(const FamilyParams& p, double x) {
  validate(p);
  if (!(x >= p.x_min))
    throw DomainError("tail_mass requires x >= x_min");
  return normalization(p) * p.x_min / (p.alpha - 1) *
         std::pow(p.x_min / x, p.alpha - 1);
}

double icdf(const FamilyParams& p, double q) {
  validate(p);
  if (!(q >= 0 && q < 1))
    throw DomainError("icdf requires 0 <= q < 1");
  if (q == 0) return 0;
  const double a = p.alpha;
  const double b = effective_beta(p);
  const double xm = p.x_min;
  switch (core_of(p.family)) {
    case Core::uni: {
      const double qc = (a - 1) / a;
      if (q <= qc) return q / normalization(p);
      return xm * std::pow(a * (1 - q), -1.0 / (a - 1));
    }
    case Core::pow: {
      const double qc = (a - 1) / (a + b);
      if (q <= qc) return xm * std::pow(q * (a + b) / (a - 1), 1.0 / (b + 1));
      return xm * std::pow((b + 1) / ((1 - q) * (a + b)), 1.0 / (a - 1));
    }
    case Core::exp_like: {
      const double qc = exp_cdf_core(a, b, 1.0);
      if (q <= qc) return xm * exp_icdf_core(a, b, q);
      return xm * std::pow(exp_b_over_denom(a, b) / (1 - q), 1.0 / (a - 1));
    }
    case Core::alg: {
      const double dm = alg_tail_denom(a, b);
      const double qc = (a - 1) * (2 * b + 1) / dm;
      if (q >= qc)
        return xm * std::pow((b + 1) / ((1 - q) * dm), 1.0 / (a - 1));
      // root of the core cdf minus q, bracketed by [0, x_min]
      auto phi = [&](double x) { return cdf(p, x) - q; };
      auto dphi = [&](double x) { return pdf(p, x); };
      const double x0 = q * xm * dm / ((a - 1) * (2 * b + 2));
      SolverConfig cfg;
      cfg.tol_f = 1e-15;
      cfg.tol_x = 1e-14;
      return newton(phi, dphi, x0, 0.0, xm, cfg);
    }
  }
  return 0;
}

double mean(const FamilyParams& p) {
  validate(p);
  const double a = p.alpha;
  const double b = effective_beta(p);
  const double xm = p.x_min;
  if (!(a > 2))
    throw MomentUndefined("mean requires alpha > 2, got " + std::to_string(a));
  switch (core_of(p.family)) {
    case Core::uni:
      return xm * (a - 1) / (2 * (a - 2));
    case Core::pow:
      return xm * (a - 1) * (b + 1) / ((b + 2) * (a - 2));
    case Core::exp_like:
      return xm * (a - 1) *
             (exp_em1b_over_denom(a, b) / b + exp_b_over_denom(a, b) / (a - 2));
    case Core::alg:
      return normalization(p) * xm * xm * ((b + 1) / (b + 2) + 1.0 / (a - 2));
  }
  return 0;
}

double second_moment(const FamilyParams& p) {
  validate(p);
  const double a = p.alpha;
  const double b = effective_beta(p);
  const double xm = p.x_min;
  if (!(a > 3))
    throw MomentUndefined("second moment requires alpha > 3, got " +
                          std::to_string(a));
  switch (core_of(p.family)) {
    case Core::uni:
      return xm * xm * (a - 1) / (3 * (a - 3));
    case Core::pow:
      return xm * xm * (a - 1) * (b + 1) / ((b + 3) * (a - 3));
    case Core::exp_like:
      return xm * xm * (a - 1) *
             (exp_m2num_over_denom(a, b) / (b * b) +
              exp_b_over_denom(a, b) / (a - 3));
    case Core::alg:
      return normalization(p) * xm * xm * xm *
             ((2 * b + 3) / (3 * (b + 3)) + 1.0 / (a - 3));
  }
  return 0;
}

double log_likelihood(const FamilyParams& p, const SplitStats& stats,
                      double alg_core_mean_value) {
  const double lc = log_normalization(p);
  const double a = p.alpha;
  const double b = effective_beta(p);
  const double lxm = std::log(p.x_min);
  const double nd = static_cast<double>(stats.n);
  const double nt = static_cast<double>(stats.n_tail);
  const double nc = static_cast<double>(stats.n_core);
  double ll = nd * lc;
  if (stats.n_tail > 0) ll -= a * nt * (stats.mean_ln_tail - lxm);
  if (stats.n_core > 0) {
    switch (core_of(p.family)) {
      case Core::uni:
        break;
      case Core::pow:
        ll -= b * nc * (lxm - stats.mean_ln_core);
        break;
      case Core::exp_like:
        ll -= b * nc * (stats.mean_core / p.x_min - 1);
        break;
      case Core::alg:
        if (std::isnan(alg_core_mean_value))
          throw InvalidParams(
              "log_likelihood: the algebraic core average is not a function of "
              "SplitStats; pass it explicitly or use the sample overload");
        ll += nc * alg_core_mean_value;
        break;
    }
  }
  return ll;
}

double log_likelihood(const FamilyParams& p, const SplitStats& stats) {
  return log_likelihood(p, stats, std::numeric_limits<double>::quiet_NaN());
}

double alg_core_mean(const SortedSample& sample, double beta, double x_min) {
  const std::size_t n_core = sample.count_at_most(x_min);
  if (n_core == 0) return 0;
  const double lxm = std::log(x_min);
  double sum = 0, comp = 0;
  const double* lv = sample.ln_values().data();
  for (std::size_t i = 0; i < n_core; ++i) {
    const double t = beta * (lv[i] - lxm);
    const double v = std::log1p(-std::expm1(t));
    const double y = v - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum / static_cast<double>(n_core);
}

double log_likelihood(const FamilyParams& p, const SortedSample& sample) {
  const SplitStats stats = sample.split_at(p.x_min);
  if (core_of(p.family) == Core::alg)
    return log_likelihood(p, stats,
                          alg_core_mean(sample, effective_beta(p), p.x_min));
  return log_likelihood(p, stats);
}

std::vector<double> sample_variates(const FamilyParams& p, std::size_t count,
                                    std::uint64_t seed, bool parallel) {
  validate(p);
  if (count < 1) throw DomainError("sample_variates requires count >= 1");
  std::vector<double> out(count);
  const CounterRng rng{seed};
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
      out[static_cast<std::size_t>(i)] =
          icdf(p, rng.uniform01(static_cast<std::uint64_t>(i)));
  } else {
    for (std::size_t i = 0; i < count; ++i)
      out[i] = icdf(p, rng.uniform01(i));
  }
  return out;
}

}  // namespace coretail
