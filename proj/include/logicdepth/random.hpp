#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace logicdepth {

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so draws are
/// derived from the raw mt19937_64 stream instead.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace logicdepth
