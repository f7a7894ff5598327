// SPDX-License-Identifier: MIT
#pragma once
// Counter-based deterministic random streams.
//
// Every random quantity is a pure function of (stream key, counter), where
// the key is folded from the sweep cell's identifying data (dimension, grid,
// box scale, shell, seed, role tag). No generator state is shared or
// advanced, so results are independent of evaluation order and worker
// count — the property the reproducibility guarantee rests on.

#include <cstdint>
#include <initializer_list>

namespace nullform {

// SplitMix64 finalizer: a well-mixed 64-bit permutation
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2)));
}

// pack a small signed lattice vector into one 64-bit counter (21 bits/axis)
inline std::uint64_t pack_lattice(int x0, int x1, int x2) {
  constexpr std::uint64_t mask = (1ull << 21) - 1;
  return ((static_cast<std::uint64_t>(static_cast<std::uint32_t>(x0)) & mask) << 42) |
         ((static_cast<std::uint64_t>(static_cast<std::uint32_t>(x1)) & mask) << 21) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x2)) & mask);
}

struct RngStream {
  std::uint64_t key = 0;

  static RngStream of(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t k = 0x7F4A7C15ull;
    for (std::uint64_t p : parts) k = hash_combine(k, p);
    return RngStream{k};
  }
  RngStream derive(std::uint64_t tag) const { return RngStream{hash_combine(key, tag)}; }

  std::uint64_t bits(std::uint64_t counter) const { return mix64(key ^ mix64(counter)); }
  // uniform double in [0, 1) with 53 random bits
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }
  double range(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }
};

}  // namespace nullform
