#pragma once

#include <cmath>
#include <cstdint>

#include "labelshift/types.hpp"

namespace labelshift {

/// Deterministic counter-based generator (SplitMix64).
///
/// Output j of a stream with seed s is mix64(s + j * GAMMA), so the whole
/// stream is a pure function of the seed and streams are reproducible across
/// machines. substream(i) derives an independent stream from (seed, i) alone,
/// using a distinct odd multiplier, so experiment replications can be
/// distributed without sharing generator state.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Substream i of this stream; depends only on (seed, i), never on how many
  /// values have been drawn.
  SeededRng substream(std::uint64_t i) const {
    return SeededRng(mix64(seed_ + (i + 1) * kStreamMult));
  }

  std::uint64_t next_u64() { return mix64(seed_ + (++counter_) * kGamma); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, bound). Bias is O(bound / 2^53), negligible at this
  /// scale.
  Eigen::Index uniform_index(Eigen::Index bound) {
    auto idx = static_cast<Eigen::Index>(uniform() * static_cast<double>(bound));
    return idx < bound ? idx : bound - 1;
  }

  /// Standard normal via Box-Muller (two uniforms per variate).
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Gamma(alpha, 1) via Marsaglia-Tsang squeeze; alpha < 1 uses the
  /// Gamma(alpha+1) boost G * U^(1/alpha).
  double gamma(double alpha) {
    if (alpha <= 0.0) throw DomainError("SeededRng::gamma: alpha must be positive");
    if (alpha < 1.0) {
      double u = 1.0 - uniform();
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    double d = alpha - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Draws a class index from a distribution by inverse CDF.
  int draw_class(const LabelDistribution& dist) {
    double u = uniform();
    double acc = 0.0;
    int last_positive = 0;
    for (Eigen::Index c = 0; c < dist.k(); ++c) {
      if (dist[c] > 0.0) last_positive = static_cast<int>(c);
      acc += dist[c];
      if (u < acc) return static_cast<int>(c);
    }
    return last_positive;  // u landed in the rounding slack at the top
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kStreamMult = 0xD1342543DE82EF95ull;
  static constexpr double kPi = 3.14159265358979323846;

  // SplitMix64 finalizer.
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace labelshift
