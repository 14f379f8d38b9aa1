#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

namespace ldb {

/// Portable seeded random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard for a given seed. The distributions are implemented here rather
/// than taken from <random> (whose algorithms are implementation-defined):
///
///   uniform()    top 53 bits of one engine draw, scaled by 2^-53, in [0, 1)
///   normal()     Box-Muller on two uniforms; the sine variate is cached and
///                returned by the next call
///   bernoulli(p) uniform() < p
///
/// Seeds for sub-streams are derived with derive_seed(), a SplitMix64 chain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Mixes a base seed with a list of integers (e.g. network size and trial
/// index) into an independent, reproducible seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

}  // namespace ldb
