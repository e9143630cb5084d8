#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "peakpoint/scaled.hpp"

namespace peakpoint {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Counter-based random stream. Output i depends only on (seed, purpose, i),
/// so streams for different purposes never interfere.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view purpose)
      : key_(detail::splitmix64(seed ^ detail::splitmix64(detail::fnv1a(purpose)))) {}

  std::uint64_t next_u64() {
    return detail::splitmix64(key_ + 0x632be59bd9b4e019ULL * counter_++);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Independent child stream.
  RandomStream split(std::string_view purpose) {
    return RandomStream(next_u64(), purpose);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform point of the disk D(center, r) from two uniforms in [0,1).
inline Complex disk_point(Complex center, double r, double u, double v) {
  const double rho = r * std::sqrt(u);
  const double theta = 2.0 * std::numbers::pi * v;
  return center + std::polar(rho, theta);
}

}  // namespace peakpoint
