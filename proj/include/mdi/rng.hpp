// Seeded, splittable random source.
//
// Rng wraps std::mt19937_64. The engine is seeded from the user seed through
// SplitMix64, and split(stream) derives an independent child seed the same
// way, so parallel workers can own generators without shared state.

#pragma once

#include <cstdint>
#include <random>

#include "mdi/numerics.hpp"

namespace mdi {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng split(std::uint64_t stream) const { return Rng(splitmix64(seed_ ^ splitmix64(stream + 1))); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  CMatrix ginibre(int rows, int cols) {
    CMatrix g(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) g(r, c) = complex_normal();
    return g;
  }

  std::mt19937_64& engine() { return engine_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mdi
