#pragma once

#include <cstdint>

namespace primesig {

// Counter-based generator built on the SplitMix64 finalizer. The n-th draw
// for a given seed is a pure function of (seed, n), so parallel workers can
// evaluate draws for disjoint index ranges and still reproduce exactly the
// stream a sequential run would produce. That property is what makes the
// random-model experiments independent of the thread count.
struct CounterRng {
  std::uint64_t seed = 1;

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Raw 64 bits for draw number `counter`.
  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix(seed + kGamma * (counter + 1));
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection-free scaling; bias is at most
  // bound / 2^64, negligible for the small bounds used here.
  constexpr std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const {
    return static_cast<std::uint64_t>(uniform(counter) * static_cast<double>(bound));
  }
};

}  // namespace primesig
