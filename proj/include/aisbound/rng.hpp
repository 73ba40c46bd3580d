#pragma once

#include <cstdint>
#include <random>

namespace aisbound {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive decorrelated engine seeds from a
// master seed plus structural indices (sweep point, draw, stream).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix64(master ^ mix64(stream + 0x517CC1B727220A95ull) ^ mix64(index));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

// Uniform double in [0, 1) with 53 random bits; identical across platforms
// for a given engine state.
inline double uniform_unit(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace aisbound
