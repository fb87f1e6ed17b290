#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coretail/families.hpp"
#include "coretail/sample.hpp"
#include "coretail/solvers.hpp"

namespace coretail {

struct FitOptions {
  SolverConfig solver;
  // Evaluate scan intervals concurrently (OpenMP). The reduction is a
  // deterministic lexicographic max, so the result does not depend on the
  // thread count; serial and parallel scans agree bit for bit.
  bool parallel = true;
  // Fix the core shape for pow/exp/alg fits.
  std::optional<double> pinned_beta;
  // forced-alg candidate evaluations cost O(n) each; above this many scan
  // intervals that family switches to a coarse-to-fine interval subset.
  std::size_t scan_budget = 2048;
  // Bracketing grid for the exp-family root searches in beta; the zero guard
  // excludes the undefined point beta = 0.
  double beta_grid_lo = -50.0;
  double beta_grid_hi = 50.0;
  double beta_zero_guard = 1e-8;
  // Search range for the alg-family profile over beta.
  double alg_beta_lo = 1e-6;
  double alg_beta_hi = 256.0;
};

struct FitResult {
  FamilyParams params;
  double loglik = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  // Winning 1-based scan interval j (x_min in [y_j, y_{j+1})). For pinned
  // x_min below y_1 this is 0; at or above y_m it is m.
  std::ptrdiff_t interval_index = -1;
  bool at_boundary = true;  // maximizer at x_min = y_j rather than inside
  std::string branch_notes;
};

// --- fixed-x_min estimators -------------------------------------------------
// MLE of alpha at fixed (x_min, beta). beta is ignored for uni and forced
// families (forced cores use beta = alpha). Throws NoTailData when the tail
// set is empty and NoSolutionInRange when the stationary alpha is not > 1.
double fit_alpha(Family f, const SplitStats& stats, double x_min, double beta,
                 const SolverConfig& cfg = {});
// Sample overload; required for forced_alg, whose score depends on the core
// observations themselves.
double fit_alpha(Family f, const SortedSample& s, double x_min, double beta,
                 const SolverConfig& cfg = {});

// Joint MLE of (alpha, beta) at fixed x_min for the families with a free core
// shape. Throws NoValidBeta when no admissible stationary beta exists.
std::pair<double, double> fit_beta(Family f, const SortedSample& s, double x_min,
                                   const SolverConfig& cfg = {});

// --- scan candidates ---------------------------------------------------------
struct InteriorCandidate {
  FamilyParams params;
  double loglik;
};

// Stationary points of the log-likelihood with x_min strictly inside the scan
// interval [iv.lo, iv.hi). Candidates violating the parameter ranges or the
// containment condition are dropped; an empty result is not an error. The
// pow/exp/alg families accept an optional pinned beta; alg requires it (its
// interior solve runs at fixed beta, nested under the profile search).
std::vector<InteriorCandidate> interior_candidates(
    Family f, const SortedSample& s, const SortedSample::Interval& iv,
    std::optional<double> beta = std::nullopt, const SolverConfig& cfg = {},
    std::size_t max_nm_iter = 60);

// --- fits ---------------------------------------------------------------------
// Global maximum-likelihood fit: scans every interval between consecutive
// unique observations, evaluating the boundary candidate x_min = y_j and any
// interior stationary candidates, and returns the best. Deterministic.
FitResult fit(Family f, const SortedSample& s, const FitOptions& opt = {});

// Fit with x_min pinned; optimizes the remaining free parameters.
FitResult fit_fixed_xmin(Family f, const SortedSample& s, double x_min,
                         const FitOptions& opt = {});

double aic(const FitResult& r);  // 2k - 2 lnL, k = parameter count
double bic(const FitResult& r);  // k ln n - 2 lnL

}  // namespace coretail
