#include "ragscale/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>

namespace ragscale {

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  // Reject the low sliver that would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % bound;
  }
}

double SplitMix64::normal() noexcept {
  // u1 in (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 a(seed);
  SplitMix64 b(stream ^ 0x5851f42d4c957f2dULL);
  return a.next() ^ (b.next() * 0x2545f4914f6cdd1dULL);
}

void shuffle_indices(std::span<std::size_t> indices, SplitMix64& rng) noexcept {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(indices[i - 1], indices[j]);
  }
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

}  // namespace ragscale
