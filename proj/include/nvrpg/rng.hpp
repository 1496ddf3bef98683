#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace nvrpg {

/// Deterministic xoshiro256++ generator with splitmix64 seeding.
///
/// All stochastic operations in the library draw from this generator
/// explicitly, so a 64-bit seed pins every sampled quantity bit-for-bit
/// across runs and platforms. State is serializable (see state()/set_state()).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // splitmix64 expansion of the seed into the 256-bit state
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0,1) with 53 random bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0,1], safe as a log() argument.
  double next_double_open() { return 1.0 - next_double(); }

  /// Index drawn from an unnormalized nonnegative weight vector.
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return int(i);
    }
    return int(weights.size()) - 1;
  }

  /// Index drawn from a cumulative-sum row (last entry is the total mass).
  int categorical_cdf(std::span<const double> cdf) {
    double u = next_double() * cdf.back();
    // linear walk keeps the draw order deterministic and is fast at tabular scale
    for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
      if (u < cdf[i]) return int(i);
    }
    return int(cdf.size()) - 1;
  }

  /// N(mean, std^2) via Box-Muller; consumes exactly two draws.
  double normal(double mean, double std_dev) {
    double u1 = next_double_open();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + std_dev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Geometric draw with support {0,1,2,...} and P(K=k) = (1-gamma)*gamma^k.
  int geometric(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("geometric: gamma must be in (0,1)");
    double u = next_double_open();
    return int(std::floor(std::log(u) / std::log(gamma)));
  }

  std::array<std::uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<std::uint64_t, 4>& s) { state_ = s; }

  /// Child generator seeded from the parent stream (advances the parent once).
  Rng fork() { return Rng(next_u64()); }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace nvrpg
