#pragma once

#include <cstdint>
#include <random>

namespace vdfp {

// Deterministic random source. Everything that needs randomness receives an
// Rng (or a seed derived from one) explicitly, so a whole run is reproducible
// from a single root seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    // A fresh distribution per call keeps the draw count per call fixed.
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }

  // Inclusive on both ends.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

  std::uint64_t next_seed() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent seed streams (e.g. the
// evaluation stream) from the run seed without touching the training stream.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace vdfp
