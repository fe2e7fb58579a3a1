#pragma once

#include <cstdint>
#include <random>

#include "eiprec/types.hpp"

namespace eiprec {

// Substream seed for (master, index, stream): two rounds of the SplitMix64 finalizer.
// Any trial can be recomputed from its index alone.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_bits() { return engine_(); }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Box-Muller; the second variate of each pair is cached.
  double normal();
  // Circularly-symmetric complex Gaussian with E|x|^2 = variance.
  Complex complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace eiprec
