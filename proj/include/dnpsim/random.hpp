#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dnpsim {

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trajectory `index` under `master_seed`. Depends only on the pair,
/// so results do not change with the number of workers.
constexpr std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 is fully specified by the standard; the conversions below avoid
/// the implementation-defined std distributions so streams are portable.
using Rng = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform in (0, 1].
inline double uniform_open0(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double exponential(Rng& rng, double rate) {
  return -std::log(uniform_open0(rng)) / rate;
}

/// Box-Muller; uses two uniforms per call.
inline double standard_normal(Rng& rng) {
  const double u = uniform_open0(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.141592653589793 * v);
}

}  // namespace dnpsim
