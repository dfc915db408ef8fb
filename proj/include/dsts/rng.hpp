#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace dsts {

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based SplitMix64 generator.
///
/// Draw number i (starting at 1) is mix64(seed + i * 0x9E3779B97F4A7C15), so
/// the sequence depends only on the seed and the draw count. All derived
/// distributions below are written out explicitly rather than delegated to
/// <random> distributions, whose outputs vary between standard libraries.
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept { return mix64(seed_ + (++counter_) * kGamma); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via the Box-Muller cosine branch (two uniforms per draw).
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

  /// Independent generator for a numbered sub-stream: seed ^ mix64(stream + gamma).
  Rng derive(std::uint64_t stream) const noexcept { return Rng(seed_ ^ mix64(stream + kGamma)); }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace dsts
