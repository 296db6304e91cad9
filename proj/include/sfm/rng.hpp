#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

namespace sfm {

// Deterministic random stream on top of mt19937_64.
//
// Uniform and Gaussian variates are generated from raw engine output
// (53-bit mantissa scaling, Box-Muller) instead of std:: distributions,
// whose results are implementation-defined. A normal draw always consumes
// exactly two engine outputs and nothing is cached, so the stream position
// is a pure function of the draw sequence. This makes state comparison and
// checkpointing well defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive bounds. Modulo reduction; bias is negligible for the small
  // ranges used here and keeps the draw count fixed at one.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  // Standard normal pair (Box-Muller); consumes two engine outputs.
  std::pair<double, double> normal_pair() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  double normal() { return normal_pair().first; }

  // Independent child stream. Derived from the constructor seed and the tag
  // only, never from the current position, so fan-out is reproducible no
  // matter how much of the parent stream was consumed.
  Rng child(std::uint64_t tag) const { return Rng(mix(seed_, tag)); }

  bool operator==(const Rng& other) const {
    return seed_ == other.seed_ && engine_ == other.engine_;
  }
  bool operator!=(const Rng& other) const { return !(*this == other); }

  // Exact textual state, for checkpoints. Round-trips bit-exactly.
  std::string serialize() const;
  static Rng deserialize(const std::string& blob);

 private:
  // splitmix64-style avalanche of (seed, tag).
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace sfm
