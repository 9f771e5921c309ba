#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rbkit {

/// Deterministic random source used by every sampler in the library.
///
/// Wraps std::mt19937_64 and performs its own conversions to floating point
/// and bounded integers so that streams are identical across standard
/// library implementations (std::uniform_*_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on [2^-53, 1); safe to pass to log().
  double uniform_positive() {
    const double u = uniform();
    return u < 0x1.0p-53 ? 0x1.0p-53 : u;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  /// Seed for an independent child stream.
  std::uint64_t fork() { return mix_seed(next(), 0x9e3779b97f4a7c15ULL); }

  /// splitmix64 finalizer over (seed, stream).
  static std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rbkit
