#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace ragscale {

/// Portable 64-bit splitmix generator. Every random decision in the library
/// (fold shuffles, chunk permutations, synthetic noise, multi-start shifts)
/// draws from this stream so outputs are reproducible across platforms and
/// standard library implementations.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound) without modulo bias. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller (one variate per call, two uniforms).
  double normal() noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from (seed, stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// In-place Fisher-Yates shuffle of an index array.
void shuffle_indices(std::span<std::size_t> indices, SplitMix64& rng) noexcept;

/// FNV-1a 64-bit hash rendered as "fnv1a64:<16 hex digits>".
std::string content_digest(std::string_view bytes);

}  // namespace ragscale
