#ifndef SPARSEHCR_RANDOM_HPP
#define SPARSEHCR_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sparsehcr {

/// Stream purposes keep the measurement matrix, the per-trial noise and
/// auxiliary draws on disjoint generator streams for the same seed.
enum class StreamPurpose : std::uint64_t {
  Matrix = 0x4d41545249580000ULL,
  Noise = 0x4e4f495345000000ULL,
  Witness = 0x5749544e45535300ULL,
  Sampling = 0x53414d504c450000ULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamPurpose purpose,
                                    std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(purpose)) + index);
}

/// The repo-wide pseudo-random source: std::mt19937_64 seeded by a
/// splitmix64 hash of (seed, purpose, index). Uniforms take the top 53
/// bits; normals use the Box-Muller transform, caching the second variate.
/// Every draw is fully determined by the constructor arguments.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, StreamPurpose purpose = StreamPurpose::Noise,
                        std::uint64_t index = 0)
      : engine_(derive_seed(seed, purpose, index)) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection keeps the draw unbiased.
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparsehcr

#endif  // SPARSEHCR_RANDOM_HPP
