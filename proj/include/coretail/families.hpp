#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "coretail/errors.hpp"
#include "coretail/sample.hpp"

namespace coretail {

// Piecewise densities with a finite, non-zero core on [0, x_min] and a Pareto
// tail C (x_min/x)^alpha beyond. The core shapes:
//   uni         constant
//   pow         (x/x_min)^beta,            beta > -1
//   exp         exp(-beta (x/x_min - 1)),  beta != 0, beta != alpha
//   alg         2 - (x/x_min)^beta,        beta > 0
// Forced variants pin beta = alpha, which makes the density continuously
// differentiable at x_min for the exp and alg cores.
enum class Family {
  uni,
  pow,
  forced_pow,
  exp,
  forced_exp,
  alg,
  forced_alg,
};

inline constexpr std::array<Family, 7> kAllFamilies = {
    Family::uni,        Family::pow, Family::forced_pow, Family::exp,
    Family::forced_exp, Family::alg, Family::forced_alg,
};

std::string_view family_name(Family f);  // "uni", "pow", "forced-pow", ...
std::optional<Family> family_from_name(std::string_view name);
bool family_is_forced(Family f);
bool family_has_free_beta(Family f);  // pow, exp, alg
int family_param_count(Family f);     // 2 for uni/forced, 3 otherwise

struct FamilyParams {
  Family family = Family::uni;
  double alpha = 2.0;
  double beta = 0.0;  // equals alpha for forced families, unused for uni
  double x_min = 1.0;
};

FamilyParams uni_params(double alpha, double x_min);
FamilyParams forced_params(Family f, double alpha, double x_min);
FamilyParams general_params(Family f, double alpha, double beta, double x_min);
// From CLI-style inputs: beta required exactly when the family has a free beta.
FamilyParams make_params(Family f, double alpha, std::optional<double> beta,
                         double x_min);

// Throws InvalidParams naming the violated bound.
void validate(const FamilyParams& p);
bool is_valid(const FamilyParams& p);

double normalization(const FamilyParams& p);  // C
double log_normalization(const FamilyParams& p);

double pdf(const FamilyParams& p, double x);
double log_pdf(const FamilyParams& p, double x);
double cdf(const FamilyParams& p, double x);
// Probability mass of [x, inf) in closed form; requires x >= x_min.
double tail_mass(const FamilyParams& p, double x);
// Quantile function on [0, 1). The alg core below its critical probability is
// solved by safeguarded Newton on the core cdf, bracketed by [0, x_min].
double icdf(const FamilyParams& p, double q);

double mean(const FamilyParams& p);            // requires alpha > 2
double second_moment(const FamilyParams& p);   // requires alpha > 3

// Log-likelihood from sufficient statistics; stats must come from a split at
// p.x_min. Not available for the algebraic cores, whose core average
// <ln(2 - (x/x_min)^beta)>_S is not a function of SplitStats: use the
// three-argument overload or the whole-sample one.
double log_likelihood(const FamilyParams& p, const SplitStats& stats);
double log_likelihood(const FamilyParams& p, const SplitStats& stats,
                      double alg_core_mean);
double log_likelihood(const FamilyParams& p, const SortedSample& sample);

// <ln(2 - (x/x_min)^beta)>_S by direct summation over the core set.
double alg_core_mean(const SortedSample& sample, double beta, double x_min);

// Inverse-transform sampling, deterministic in the seed. Uniform variates
// come from a counter-based splitmix64 stream (see rng.hpp), so the output is
// identical whether or not the loop runs under OpenMP.
std::vector<double> sample_variates(const FamilyParams& p, std::size_t count,
                                    std::uint64_t seed, bool parallel = true);

}  // namespace coretail
