#include "coretail/sample.hpp"

#include <algorithm>
#include <cmath>

namespace coretail {

namespace {

// Neumaier-compensated running sum; the prefix arrays feed root finders whose
// brackets depend on the sign of small differences.
struct CompensatedSum {
  double sum = 0;
  double comp = 0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

SortedSample SortedSample::from_values(std::vector<double> raw) {
  std::vector<double> vals;
  vals.reserve(raw.size());
  for (double v : raw) {
    if (!std::isfinite(v)) continue;  // non-finite entries are dropped
    if (v <= 0)
      throw NonPositiveValue("observation " + std::to_string(v) +
                             " violates the positivity requirement x > 0");
    vals.push_back(v);
  }
  if (vals.size() < 2)
    throw EmptyInput("need at least 2 finite observations, got " +
                     std::to_string(vals.size()));
  std::sort(vals.begin(), vals.end());

  SortedSample s;
  s.values_ = std::move(vals);
  const std::size_t n = s.values_.size();
  s.ln_values_.resize(n);
  s.prefix_ln_.resize(n + 1);
  s.prefix_x_.resize(n + 1);
  CompensatedSum sum_ln, sum_x;
  s.prefix_ln_[0] = 0;
  s.prefix_x_[0] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.ln_values_[i] = std::log(s.values_[i]);
    sum_ln.add(s.ln_values_[i]);
    sum_x.add(s.values_[i]);
    s.prefix_ln_[i + 1] = sum_ln.value();
    s.prefix_x_[i + 1] = sum_x.value();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (s.uniques_.empty() || s.values_[i] != s.uniques_.back()) {
      s.uniques_.push_back(s.values_[i]);
      s.unique_end_.push_back(i + 1);
    } else {
      s.unique_end_.back() = i + 1;
    }
  }
  return s;
}

std::size_t SortedSample::count_at_most(double x) const {
  return static_cast<std::size_t>(
      std::upper_bound(values_.begin(), values_.end(), x) - values_.begin());
}

SplitStats SortedSample::stats_for_core_size(std::size_t n_core) const {
  const std::size_t n = values_.size();
  SplitStats st;
  st.n = n;
  st.n_core = n_core;
  st.n_tail = n - n_core;
  if (n_core > 0) {
    st.mean_ln_core = prefix_ln_[n_core] / static_cast<double>(n_core);
    st.mean_core = prefix_x_[n_core] / static_cast<double>(n_core);
  }
  if (st.n_tail > 0)
    st.mean_ln_tail =
        (prefix_ln_[n] - prefix_ln_[n_core]) / static_cast<double>(st.n_tail);
  return st;
}

SplitStats SortedSample::split_at(double x_min) const {
  return stats_for_core_size(count_at_most(x_min));
}

std::size_t SortedSample::interval_count() const {
  return uniques_.size() < 2 ? 0 : uniques_.size() - 1;
}

SortedSample::Interval SortedSample::interval(std::size_t j) const {
  Interval iv;
  iv.index = j;
  iv.lo = uniques_[j - 1];
  iv.hi = uniques_[j];
  iv.stats = stats_for_core_size(unique_end_[j - 1]);
  return iv;
}

std::vector<SortedSample::Interval> SortedSample::intervals() const {
  std::vector<Interval> out;
  out.reserve(interval_count());
  for (std::size_t j = 1; j <= interval_count(); ++j) out.push_back(interval(j));
  return out;
}

}  // namespace coretail
