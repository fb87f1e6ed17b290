#pragma once

#include <cstddef>
#include <vector>

#include "coretail/errors.hpp"

namespace coretail {

// Sufficient statistics of a sample split at a threshold x_min. The tail set
// holds observations strictly greater than x_min, the core set the rest, so a
// value equal to x_min belongs to the core.
struct SplitStats {
  std::size_t n = 0;         // total observations
  std::size_t n_tail = 0;    // |{x_i > x_min}|
  std::size_t n_core = 0;    // |{x_i <= x_min}|
  double mean_ln_tail = 0;   // <ln x> over the tail set (0 when empty)
  double mean_ln_core = 0;   // <ln x> over the core set (0 when empty)
  double mean_core = 0;      // <x>  over the core set (0 when empty)
};

// Immutable sorted sample with compensated prefix sums. Split statistics at
// any threshold cost O(log n); the scan intervals between consecutive unique
// values come with the statistics valid throughout each interval.
class SortedSample {
 public:
  // Sorts and validates raw observations. Non-finite entries are dropped,
  // values <= 0 raise NonPositiveValue, fewer than two usable values raise
  // EmptyInput.
  static SortedSample from_values(std::vector<double> raw);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& ln_values() const { return ln_values_; }
  const std::vector<double>& uniques() const { return uniques_; }
  std::size_t size() const { return values_.size(); }

  SplitStats split_at(double x_min) const;

  // Number of observations <= x.
  std::size_t count_at_most(double x) const;

  // Scan interval [lo, hi) between consecutive unique values; the split sets
  // are constant for any x_min inside it and equal those of split_at(lo).
  struct Interval {
    std::size_t index = 0;  // 1-based j for [y_j, y_{j+1})
    double lo = 0;
    double hi = 0;
    SplitStats stats;
  };

  // All m-1 intervals [y_j, y_{j+1}), j = 1..m-1.
  std::vector<Interval> intervals() const;
  Interval interval(std::size_t j) const;  // 1-based
  std::size_t interval_count() const;      // m-1 (0 when all values equal)

  double sum_ln_prefix(std::size_t k) const { return prefix_ln_[k]; }
  double sum_x_prefix(std::size_t k) const { return prefix_x_[k]; }

 private:
  SortedSample() = default;
  SplitStats stats_for_core_size(std::size_t n_core) const;

  std::vector<double> values_;     // ascending
  std::vector<double> ln_values_;  // ln of values_, same order
  std::vector<double> uniques_;    // ascending distinct values
  std::vector<std::size_t> unique_end_;  // count of values <= uniques_[k]
  std::vector<double> prefix_ln_;  // prefix_ln_[k] = sum of ln(values[0..k))
  std::vector<double> prefix_x_;   // prefix_x_[k]  = sum of values[0..k)
};

}  // namespace coretail
