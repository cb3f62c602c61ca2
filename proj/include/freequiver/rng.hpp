#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "freequiver/linalg.hpp"

namespace freequiver {

/// Seeded sampler: std::mt19937_64 feeding a Box-Muller transform. Both the
/// engine and the transform are fully specified, so draws are bit-identical
/// across standard libraries (unlike std::normal_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform();
  /// Standard complex normal: real and imaginary parts each N(0, 1), independent.
  Complex complex_normal();
  /// Complex Ginibre matrix (i.i.d. complex_normal entries, row-major fill order).
  Matrix ginibre(Index rows, Index cols);
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Stable 64-bit hash of (master, index, tag) via FNV-1a on the tag and
/// splitmix64 finalization. Used to derive per-trial seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index, std::string_view tag = {});

}  // namespace freequiver
