#include "coretail/santafe.hpp"

#include <algorithm>
#include <cmath>

namespace coretail::santafe {

void validate(const Params& p) {
  if (!(std::isfinite(p.t)))
    throw InvalidParams("santafe threshold t must be finite");
  if (!(p.rho >= kRhoMin))
    throw InvalidParams("santafe rho below the evaluation guard rho >= 1e-8");
  if (!(p.rho <= 0.5 - kRhoMaxGap))
    throw InvalidParams("santafe requires rho < 1/2");
  if (p.n_system < 2) throw InvalidParams("santafe requires N >= 2");
}

// Wichura's algorithm AS 241 (PPND16): rational approximations for the
// standard normal quantile, absolute error around 1e-15.
double inv_norm_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("inv_norm_cdf requires 0 < p < 1");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0 ? p : 1 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0 ? -v : v;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

DegreeSample DegreeSample::from_degrees(std::vector<long> degrees,
                                        std::size_t n_system) {
  if (n_system < 2) throw InvalidParams("santafe requires N >= 2");
  if (degrees.empty()) throw DegenerateSample("no degree observations");
  DegreeSample ds;
  ds.n_system = n_system;
  const double nm1 = static_cast<double>(n_system) - 1.0;
  ds.y.reserve(degrees.size());
  double sy = 0, sy2 = 0;
  for (long k : degrees) {
    if (k < 1 || k > static_cast<long>(n_system) - 2)
      throw DomainError(
          "degree k = " + std::to_string(k) +
          " outside the asymptotic form's validity range 1 <= k <= N-2 "
          "(it requires 0 < k/(N-1) < 1)");
    const double yk = inv_norm_cdf(1.0 - static_cast<double>(k) / nm1);
    ds.y.push_back(yk);
    sy += yk;
    sy2 += yk * yk;
  }
  ds.degrees = std::move(degrees);
  ds.mean_y = sy / static_cast<double>(ds.y.size());
  ds.mean_y2 = sy2 / static_cast<double>(ds.y.size());
  return ds;
}

double log_pk(const Params& p, long k) {
  validate(p);
  if (k < 1 || k > static_cast<long>(p.n_system) - 2)
    throw DomainError("pk requires 1 <= k <= N-2, got " + std::to_string(k));
  const double yk =
      inv_norm_cdf(1.0 - static_cast<double>(k) /
                             (static_cast<double>(p.n_system) - 1.0));
  return -std::log(static_cast<double>(p.n_system) - 1.0) +
         0.5 * (std::log1p(-p.rho) - std::log(p.rho)) -
         (1 - 2 * p.rho) / (2 * p.rho) * yk * yk +
         p.t * yk * std::sqrt(1 - p.rho) / p.rho - p.t * p.t / (2 * p.rho);
}

double pk(const Params& p, long k) { return std::exp(log_pk(p, k)); }

double log_likelihood(const Params& p, const DegreeSample& ds) {
  validate(p);
  const double n = static_cast<double>(ds.y.size());
  return n * (-std::log(static_cast<double>(p.n_system) - 1.0) +
              0.5 * (std::log1p(-p.rho) - std::log(p.rho)) -
              (1 - 2 * p.rho) / (2 * p.rho) * ds.mean_y2 +
              p.t * ds.mean_y * std::sqrt(1 - p.rho) / p.rho -
              p.t * p.t / (2 * p.rho));
}

FitOutcome fit_from_moments(double mean_y, double mean_y2, std::size_t n,
                            std::size_t n_system) {
  if (n == 0) throw DegenerateSample("no degree observations");
  const double var = std::max(0.0, mean_y2 - mean_y * mean_y);
  double rho = var / (var + 1.0);
  rho = std::min(rho, 0.5 - kRhoMaxGap);

  DegreeSample moments;
  moments.n_system = n_system;
  moments.y.resize(n);  // only the size and moments enter the likelihood
  moments.mean_y = mean_y;
  moments.mean_y2 = mean_y2;

  const double rho_eval = std::max(rho, kRhoMin);
  const double t_plus = mean_y * std::sqrt(1 - rho);
  Params plus{t_plus, rho_eval, n_system};
  Params minus{-t_plus, rho_eval, n_system};
  FitOutcome out;
  out.rho_hat = rho;
  out.loglik_t_plus = log_likelihood(plus, moments);
  out.loglik_t_minus = log_likelihood(minus, moments);
  const bool plus_wins = out.loglik_t_plus >= out.loglik_t_minus;
  out.t_hat = plus_wins ? t_plus : -t_plus;
  out.loglik = plus_wins ? out.loglik_t_plus : out.loglik_t_minus;
  out.sign_note = std::string("t_hat sign resolved by likelihood: ") +
                  (plus_wins ? "+" : "-") + "<y> sqrt(1-rho) wins";
  if (rho < kRhoMin)
    out.sign_note += "; loglik evaluated at the rho >= 1e-8 guard";
  return out;
}

FitOutcome fit(const DegreeSample& ds) {
  return fit_from_moments(ds.mean_y, ds.mean_y2, ds.y.size(), ds.n_system);
}

}  // namespace coretail::santafe
