#pragma once

#include "mclsquad/core.hpp"

#include <cstdint>
#include <limits>

namespace mclsquad {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-keyed SplitMix64 stream. Each sample point owns one substream, keyed
/// by (seed, counter), which makes batch contents independent of how the
/// batch is partitioned.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t counter)
      : state_(mix64(seed ^ mix64(counter ^ 0xD1B54A32D192ED03ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1), always an integer multiple of 2^-53, so 1 - u is exact.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

inline CounterRng point_rng(const RngSpec& spec, std::uint64_t index) {
  return CounterRng(spec.seed, spec.stream + index);
}

}  // namespace mclsquad
