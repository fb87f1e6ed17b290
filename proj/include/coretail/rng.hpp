#pragma once

#include <cstdint>

namespace coretail {

// Counter-based uniform stream built on the splitmix64 mixer. Draw i is a
// pure function of (seed, i), so any subrange can be generated independently
// and in any order, which keeps parallel sampling deterministic.
struct CounterRng {
  std::uint64_t seed = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t i) const {
    return mix(seed + (i + 1) * 0x9E3779B97F4A7C15ULL);
  }

  // Strictly inside (0, 1): keeps inverse-transform variates off the support
  // endpoints (q = 0 would pin x = 0, q = 1 would be infinite).
  double uniform01(std::uint64_t i) const {
    return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
  }
};

}  // namespace coretail
