#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "yoco/error.hpp"

namespace yoco {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream addressed by (seed, path). Draw i is a pure
/// function of (seed, path, i): re-running a pipeline with the same seed gives
/// bit-identical draws no matter how work is scheduled across threads.
/// split(k) derives the child stream (seed, path + [k]); children with
/// different indices produce independent sequences and never share state with
/// the parent, so a parent may keep drawing after splitting.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : seed_(seed), key_(mix64(seed ^ kSeedSalt)) {}

  RngStream split(std::uint64_t index) const {
    RngStream child(*this);
    child.path_.push_back(index);
    child.key_ = mix64(key_ ^ mix64(index ^ kSplitSalt));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next() { return mix64(key_ + ++counter_ * kGolden); }

  /// Uniform draw on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). Lemire multiply-shift; the bias is
  /// bound/2^64 and irrelevant at the bounds used here.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (two uniforms, no rejection).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape) {
    if (shape <= 0.0)
      throw Error(Errc::InvalidParameter, "gamma shape must be positive");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Beta(alpha, alpha) on (0,1); alpha=1 is the uniform distribution.
  double beta(double alpha) {
    if (alpha <= 0.0)
      throw Error(Errc::InvalidParameter, "beta alpha must be positive");
    const double g1 = gamma(alpha);
    const double g2 = gamma(alpha);
    return g1 / (g1 + g2);
  }

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSeedSalt = 0xA0761D6478BD642FULL;
  static constexpr std::uint64_t kSplitSalt = 0xE7037ED1A0B428DBULL;

  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

inline RngStream split_stream(const RngStream& parent, std::uint64_t index) {
  return parent.split(index);
}

inline double draw_uniform(RngStream& stream) { return stream.uniform(); }

inline double draw_beta(RngStream& stream, double alpha) {
  return stream.beta(alpha);
}

}  // namespace yoco
