#pragma once

#include <cstdint>
#include <random>

#include "fastpca/vec.hpp"

namespace fastpca {

// Deterministic seeded generator. The integer stream is the C++-standard
// mt19937_64 sequence, so identical seeds give identical streams on every
// conforming platform; gaussians come from a fixed Box-Muller map on that
// stream rather than the implementation-defined std::normal_distribution.
// Single-owner: concurrent use requires split() into child generators.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

  explicit SeededRng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on the uniform stream.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Index in [0, n) by scaling one uniform draw.
  std::size_t uniform_index(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  // Independently seeded child generator; the parent stream is not consumed.
  SeededRng split(std::uint64_t stream) const {
    return SeededRng(mix(seed_ ^ mix(stream + 0x9E3779B97F4A7C15ULL)));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Uniform unit vector: d independent standard normals, normalized.
inline Vec random_unit_vector(SeededRng& rng, std::size_t d) {
  if (d == 0) throw InputError("random_unit_vector: dimension must be >= 1");
  Vec v(d);
  double n2 = 0.0;
  do {
    for (std::size_t i = 0; i < d; ++i) v[i] = rng.gaussian();
    n2 = norm2(v);
  } while (!(n2 > 0.0));  // resample on the measure-zero all-zeros draw
  scale(v, 1.0 / std::sqrt(n2));
  return v;
}

}  // namespace fastpca
