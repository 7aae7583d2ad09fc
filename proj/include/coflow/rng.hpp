#pragma once

#include <cstdint>
#include <limits>

namespace coflow {

// Counter-based generator: output n is a SplitMix64 finalization of
// (key + n * golden). Streams are addressed by (seed, tag, index), so the
// numbers drawn for one coflow never depend on how many were drawn for
// another. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static CounterRng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return CounterRng(mix(mix(seed ^ mix(tag)) + index));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace coflow
