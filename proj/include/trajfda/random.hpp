#pragma once

#include <cstdint>
#include <random>

#include "trajfda/core.hpp"

namespace trajfda {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` of a parent seed. Stable across runs and thread counts.
inline RandomSeed derive_seed(RandomSeed parent, std::uint64_t index) {
  return RandomSeed{splitmix64(parent.value ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

using Rng = std::mt19937_64;

inline Rng make_rng(RandomSeed seed) { return Rng(splitmix64(seed.value)); }

/// Standard normal draws; sd scales the result.
class NormalSource {
 public:
  explicit NormalSource(RandomSeed seed) : rng_(make_rng(seed)) {}
  double operator()(double sd = 1.0) { return sd * dist_(rng_); }
  Rng& engine() { return rng_; }

 private:
  Rng rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace trajfda
