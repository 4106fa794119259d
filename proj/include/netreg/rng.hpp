#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, tag, a, b, counter), so per-agent and per-pair variates do not
// depend on iteration order or thread count.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace netreg::rng {

inline constexpr std::string_view kAlgorithm = "splitmix64-counter-v1";

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag,
                                   std::uint64_t a = 0, std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ tag);
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

/// Uniform on [0,1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Independent stream keyed once; draws advance an internal counter.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  constexpr double uniform() noexcept { return to_unit(next_u64()); }

  /// Standard normal via Box-Muller; one normal per two uniforms.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream tags.
inline constexpr std::uint64_t kTagLatent = 1;
inline constexpr std::uint64_t kTagLink = 2;
inline constexpr std::uint64_t kTagCovariate = 3;
inline constexpr std::uint64_t kTagError = 4;
inline constexpr std::uint64_t kTagPairs = 5;
inline constexpr std::uint64_t kTagReplication = 6;

}  // namespace netreg::rng
