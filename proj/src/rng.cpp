#include "freequiver/rng.hpp"

#include <cmath>
#include <numbers>

namespace freequiver {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

Complex Rng::complex_normal() {
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

Matrix Rng::ginibre(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = complex_normal();
  }
  return m;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ splitmix64(index)) ^ h);
}

}  // namespace freequiver
