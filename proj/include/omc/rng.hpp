#pragma once

#include <cmath>
#include <cstdint>

namespace omc {

// splitmix64 finalizer. Bijective on uint64; used both as the stream-seed
// mixer and as the core generator so results are identical across platforms
// (no reliance on std::mt19937_64 / std::normal_distribution, whose outputs
// are not pinned down by the standard at bit level).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives the seed of an independent named stream from a master seed.
// Streams with different indices are decorrelated by the double mix.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) + 0x9E3779B97F4A7C15ull * (stream + 1));
}

// Deterministic sequential PRNG (splitmix64). Every consumer owns one Rng
// seeded via stream_seed, so call-order changes in one module never shift
// another module's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1): 53 top bits.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]: never zero, safe under log().
  double next_unit_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n). Lemire multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n) {
    // n == 0 is a caller bug; keep the check cheap.
    std::uint64_t x = next_u64();
    __uint128_t m = __uint128_t(x) * n;
    std::uint64_t lo = std::uint64_t(m);
    if (lo < n) {
      std::uint64_t t = (0ull - n) % n;
      while (lo < t) {
        x = next_u64();
        m = __uint128_t(x) * n;
        lo = std::uint64_t(m);
      }
    }
    return std::uint64_t(m >> 64);
  }

  int next_index(int n) { return int(next_below(std::uint64_t(n))); }

  // Standard normal via Box-Muller (cosine branch only, so the draw count
  // per call is fixed and replay never depends on caller parity).
  double next_gaussian() {
    double u1 = next_unit_pos();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace omc
