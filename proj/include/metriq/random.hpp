#pragma once

#include <cstdint>
#include <random>

namespace metriq {

/// Seed of a reproducible random stream. Identical seeds give identical outputs.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Child seed for sub-task `index`; uses a splitmix64 counter scheme.
  RngSeed derive(std::uint64_t index) const;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Thin wrapper over mt19937_64 with library-defined variate transforms, so
/// streams do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(RngSeed seed);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1).
  double uniform_open();
  bool bernoulli(double prob) { return uniform() < prob; }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double normal();
  double exponential();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace metriq
