#pragma once

#include <cstdint>
#include <string_view>

namespace adsparse {

/// Counter-addressable 64-bit stream: value at `index` of the stream keyed by
/// `seed`. Any entry can be produced without sequencing, so generation is
/// order-independent and trivially parallel.
uint64_t mix_at(uint64_t seed, uint64_t index);

/// Uniform double in [0, 1) from stream position `index`.
double uniform_at(uint64_t seed, uint64_t index);

/// Standard normal (Box-Muller) consuming stream positions 2*index, 2*index+1.
double normal_at(uint64_t seed, uint64_t index);

/// Sequential cursor over a counter stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed) {}
  uint64_t next_u64() { return mix_at(seed_, counter_++); }
  double next_uniform();                 // [0, 1)
  double next_normal();
  uint64_t next_below(uint64_t bound);   // [0, bound)

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

/// Stable hash of (master, tag, s, trial); every trial of a sweep can be
/// reproduced in isolation from these four values.
uint64_t derive_seed(uint64_t master, std::string_view tag, int s, int trial);

}  // namespace adsparse
