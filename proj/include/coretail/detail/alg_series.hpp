#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "coretail/sample.hpp"

namespace coretail::detail {

// Fast core sums for the algebraic family at one fixed beta > 0.
//
// With z_i = (x_i/x_min)^beta in (0, 1] for core observations, the scan needs
//   log_core_sum(k, x_min) = sum_{i<k} ln(2 - z_i)
//   ratio_sum(k, x_min)    = sum_{i<k} 1/(2 (x_min/x_i)^beta - 1)
// for every candidate x_min. Both expand in powers of z/2,
//   ln(2 - z) = ln 2 - sum_p z^p / (p 2^p),     z/(2 - z) = sum_p (z/2)^p,
// with geometric convergence (ratio 1/2, still valid at z = 1), so prefix
// sums of x_i^(p beta) turn each query into O(order * blocks) flops. The
// power sums are kept per block of the sorted values with a per-block
// reference scale, which keeps every stored number in [0, n] and makes
// underflow harmless.
class AlgCoreSeries {
 public:
  AlgCoreSeries(const SortedSample& s, double beta) : beta_(beta) {
    ln_ = s.ln_values();
    const std::size_t n = ln_.size();

    const double lo = ln_.front(), hi = ln_.back();
    double width = std::min(1.0, 600.0 / (kOrder * beta));
    const double range = std::max(hi - lo, 1e-12);
    width = std::max(width, range / 65536.0);
    const std::size_t nblocks =
        static_cast<std::size_t>(std::floor(range / width)) + 1;
    blocks_.reserve(nblocks);
    std::size_t begin = 0;
    for (std::size_t b = 0; b < nblocks && begin < n; ++b) {
      const double upper = lo + (b + 1 == nblocks ? range * 2 : width * (b + 1));
      std::size_t end = begin;
      while (end < n && ln_[end] <= upper) ++end;
      if (end == begin) continue;
      blocks_.push_back(Block{begin, end, ln_[end - 1]});
      begin = end;
    }

    cum_.resize(static_cast<std::size_t>(kOrder) * n);
    std::vector<double> base(n), pw(n);
    for (const Block& blk : blocks_)
      for (std::size_t i = blk.begin; i < blk.end; ++i)
        base[i] = std::exp(beta_ * (ln_[i] - blk.ln_ref));
    for (std::size_t i = 0; i < n; ++i) pw[i] = 1.0;
    for (int p = 1; p <= kOrder; ++p) {
      double* row = cum_.data() + static_cast<std::size_t>(p - 1) * n;
      for (const Block& blk : blocks_) {
        double run = 0;
        for (std::size_t i = blk.begin; i < blk.end; ++i) {
          pw[i] *= base[i];
          run += pw[i];
          row[i] = run;
        }
      }
    }
  }

  double beta() const { return beta_; }

  // sum_{i<k} ln(2 - (x_i/x_min)^beta); requires x_{k-1} <= x_min
  double log_core_sum(std::size_t k, double x_min) const {
    double out = static_cast<double>(k) * kLn2;
    accumulate(k, x_min, [&](int p, double sp) { out -= sp / (p * std::exp2(p)); });
    return out;
  }

  // sum_{i<k} 1/(2 (x_min/x_i)^beta - 1)
  double ratio_sum(std::size_t k, double x_min) const {
    double out = 0;
    accumulate(k, x_min, [&](int p, double sp) { out += sp / std::exp2(p); });
    return out;
  }

 private:
  static constexpr int kOrder = 44;  // series tail < 2^-44/44 per term
  static constexpr double kLn2 = 0.6931471805599453;

  struct Block {
    std::size_t begin, end;
    double ln_ref;
  };

  template <class Sink>
  void accumulate(std::size_t k, double x_min, Sink&& sink) const {
    if (k == 0) return;
    const double lxm = std::log(x_min);
    const std::size_t n = ln_.size();
    // iterate blocks from the one holding index k-1 downwards
    std::ptrdiff_t bi = static_cast<std::ptrdiff_t>(blocks_.size()) - 1;
    while (bi >= 0 && blocks_[static_cast<std::size_t>(bi)].begin >= k) --bi;
    double sp[kOrder + 1];
    for (int p = 1; p <= kOrder; ++p) sp[p] = 0;
    for (; bi >= 0; --bi) {
      const Block& blk = blocks_[static_cast<std::size_t>(bi)];
      const double w1 = std::exp(beta_ * (blk.ln_ref - lxm));
      if (w1 < 1e-290) break;  // deeper blocks vanish entirely
      const std::size_t last = std::min(k, blk.end) - 1;
      double wp = 1;
      for (int p = 1; p <= kOrder; ++p) {
        wp *= w1;
        if (wp < 1e-290) break;
        sp[p] += wp * cum_[static_cast<std::size_t>(p - 1) * n + last];
      }
    }
    for (int p = 1; p <= kOrder; ++p) sink(p, sp[p]);
  }

  double beta_;
  std::vector<double> ln_;
  std::vector<Block> blocks_;
  std::vector<double> cum_;
};

}  // namespace coretail::detail
