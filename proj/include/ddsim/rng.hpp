#pragma once

// Seedable, platform-independent random number generation.
//
// Reproducibility contract: identical (seed, draw sequence) produces
// identical values on every platform. std::uniform_real_distribution gives
// no such guarantee, so uniform doubles are built from raw 64-bit output.
//
// Stream splitting: parallel work items derive independent child seeds with
// derive_seed(master, index); each child seeds its own generator. Draws
// within a stream are consumed sequentially.

#include <cstdint>

#include "ddsim/constants.hpp"

namespace ddsim {

// splitmix64 finalizer (Blackman & Vigna, public domain).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for work item `index` under `master`. Documented rule:
// mix64(master XOR mix64(index + 1)).
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::uint64_t index) {
  return mix64(master ^ mix64(index + 1));
}

// xoshiro256** (Blackman & Vigna, public domain), state initialized from the
// seed by a splitmix64 pass.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform on [0, 2*pi)
  double uniform_angle() { return constants::two_pi * uniform01(); }

  // unbiased uniform integer on [0, n), via rejection
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    std::uint64_t x;
    do {
      x = next();
    } while (x < threshold);
    return x % n;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace ddsim
