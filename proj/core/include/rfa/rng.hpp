#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rfa {

/// splitmix64, used to derive well-mixed seeds from (master seed, stream label,
/// stream index) so per-site random streams are independent of thread schedule.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic RNG. Wraps mt19937_64 (whose output sequence is pinned by the
/// standard) and provides its own variate transforms, because the std::
/// distribution objects are implementation-defined and would break
/// byte-identical reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng stream(std::uint64_t master_seed, std::string_view label, std::uint64_t index) {
    return Rng(splitmix64(master_seed ^ fnv1a64(label)) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1): 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1): never returns 0 (safe for log / inverse-CDF use).
  double uniform_open01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential(double mean = 1.0) { return -mean * std::log(uniform_open01()); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection-free enough for our n << 2^64; bias < 2^-53.
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rfa
