#pragma once

#include <cstdint>
#include <limits>

namespace plvote {

// Seed derivation
// ---------------
// Every random quantity is drawn from a splitmix64 counter stream whose key is
// derived from one master seed:
//
//   key(master, a, b) = mix(mix(master ^ A) + a * G1) + b * G2)
//
// where mix is the splitmix64 finalizer and G1, G2 are odd constants. Trials
// use a = trial index; voters use b = voter index; sweeps use a = sample index.
// Draws for (master, a, b) therefore do not depend on thread count, chunking
// or on how many draws neighbouring streams consume.

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t derive_key(std::uint64_t master, std::uint64_t a,
                                          std::uint64_t b = 0) {
  const std::uint64_t k0 = mix64(master ^ 0x6a09e667f3bcc909ULL);
  const std::uint64_t k1 = mix64(k0 + (a + 1) * 0x9e3779b97f4a7c15ULL);
  return mix64(k1 + (b + 1) * 0xd1b54a32d192ed03ULL);
}

/// splitmix64 counter stream. Satisfies UniformRandomBitGenerator so it can
/// drive <random> distributions and std::shuffle.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift; bias is below
  /// 2^-40 for the bounds used here.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace plvote
