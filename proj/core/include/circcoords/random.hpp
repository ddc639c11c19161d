#pragma once

#include <cstdint>

namespace circcoords {

// Counter-based streams: every draw is a pure function of its key, so results
// do not depend on iteration order or thread schedule.

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ (a * 0x13198a2e03707344ULL + 0xa4093822299f31d0ULL));
  h = mix64(h ^ (b * 0x082efa98ec4e6c89ULL + 0x452821e638d01377ULL));
  return h;
}

/// Uniform draw in (0, 1] keyed by (seed, a, b). Never returns 0, so a zero
/// acceptance probability rejects with certainty.
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b = 0) {
  const std::uint64_t bits = stream_key(seed, a, b) >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

}  // namespace circcoords
