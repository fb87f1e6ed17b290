#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coretail/errors.hpp"

namespace coretail::santafe {

// Latent-propensity contact model: pair propensities
// X_ij = sqrt(rho) (Z_i + Z_j) + sqrt(1 - 2 rho) Y_ij thresholded at t give,
// asymptotically in the system size N, the heavy-tailed degree weights p_k
// evaluated here.
struct Params {
  double t = 0;          // contact threshold
  double rho = 0.1;      // propensity mixing weight, 0 <= rho < 1/2
  std::size_t n_system = 2;  // system size N
};

// Evaluation needs rho bounded away from the 1/rho divergence at 0.
inline constexpr double kRhoMin = 1e-8;
inline constexpr double kRhoMaxGap = 1e-9;  // upper bound 1/2 - gap

void validate(const Params& p);

// Standard normal quantile (Wichura's AS 241, |error| ~ 1e-15).
double inv_norm_cdf(double p);
double norm_cdf(double x);

// Degrees k_i with the derived normal scores y_k = Phi^{-1}(1 - k/(N-1)).
// Valid degrees satisfy 1 <= k <= N-2; k = 0 (or k >= N-1) is rejected since
// the asymptotic form requires 0 < k/(N-1) < 1.
struct DegreeSample {
  std::vector<long> degrees;
  std::vector<double> y;
  double mean_y = 0;
  double mean_y2 = 0;
  std::size_t n_system = 0;

  static DegreeSample from_degrees(std::vector<long> degrees,
                                   std::size_t n_system);
};

double log_pk(const Params& p, long k);
double pk(const Params& p, long k);

double log_likelihood(const Params& p, const DegreeSample& ds);

struct FitOutcome {
  double t_hat = 0;
  double rho_hat = 0;
  double loglik = 0;        // at the returned pair (rho clamped to kRhoMin)
  double loglik_t_plus = 0;
  double loglik_t_minus = 0;
  std::string sign_note;
};

// Closed-form MLE: rho_hat = var(y)/(var(y)+1) clipped to [0, 1/2 - gap];
// t_hat = +-<y> sqrt(1 - rho_hat) with the sign picked by log-likelihood.
FitOutcome fit(const DegreeSample& ds);
// Moment-level entry point (used by the shift-invariance property tests).
FitOutcome fit_from_moments(double mean_y, double mean_y2, std::size_t n,
                            std::size_t n_system);

}  // namespace coretail::santafe
