#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "vstatns/common.hpp"

// Counter-based random numbers. Every draw is a pure function of
// (stream key, counter), so replications, innovations and coupled copies
// can be addressed randomly and parallel runs reproduce serial ones.

namespace vstatns::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a stream key from a root seed and a list of namespacing indices.
inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(seed ^ 0xD1B54A32D192ED03ULL);
  for (std::uint64_t k : keys) h = mix64(h ^ (mix64(k) + kGolden));
  return h;
}

inline std::uint64_t bits(std::uint64_t key, std::uint64_t ctr) {
  return mix64(key ^ mix64(ctr + kGolden));
}

/// Uniform on [0,1), 53-bit resolution.
inline double u01(std::uint64_t key, std::uint64_t ctr) {
  return static_cast<double>(bits(key, ctr) >> 11) * 0x1.0p-53;
}

/// Uniform on (0,1]; safe as a log argument.
inline double u01_open(std::uint64_t key, std::uint64_t ctr) {
  return (static_cast<double>(bits(key, ctr) >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. Draw c consumes counters 2c and 2c+1.
inline double normal(std::uint64_t key, std::uint64_t ctr) {
  const double u1 = u01_open(key, 2 * ctr);
  const double u2 = u01(key, 2 * ctr + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Sequential view over a counter stream.
struct Stream {
  std::uint64_t key = 0;
  std::uint64_t ctr = 0;

  explicit Stream(std::uint64_t k) : key(k) {}
  std::uint64_t next_bits() { return bits(key, ctr++); }
  double next_u01() { return u01(key, ctr++); }
  double next_normal() { return normal(key, ctr++); }
};

// Stream namespaces used across the library. Keeping them in one place
// guarantees distinct substreams never alias.
enum Space : std::uint64_t {
  kInnovations = 1,
  kDependenceBase = 2,
  kDependenceCoupled = 3,
  kFrozenPath = 4,
  kMixture = 5,
  kMixtureCdf = 6,
  kGaussAnalog = 7,
  kMcReplication = 8,
  kDegeneracy = 9,
  kPowerIteration = 10,
  kMcPlugin = 11,
};

}  // namespace vstatns::rng
