#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace driftbandit {

/// SplitMix64 finalizer. Full 64-bit avalanche.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replication `rep` under `base_seed`:
///   splitmix64(base_seed ^ splitmix64(rep + 0x9E3779B97F4A7C15)).
/// Depends only on the two inputs, never on scheduling.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep) noexcept;

/// Deterministic random stream owned by one replication.
///
/// The engine is std::mt19937_64 (fully specified by the standard). Uniforms
/// are built from the top 53 bits of one engine output, and Beta variates use
/// boost::random, so a seed reproduces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1). Consumes exactly one engine output.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). Consumes exactly one engine output.
  std::size_t index(std::size_t n) noexcept;

  /// Beta(a, b) variate, a, b > 0.
  double beta(double a, double b);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace driftbandit
