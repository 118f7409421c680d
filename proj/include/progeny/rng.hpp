#pragma once

// Seedable 64-bit generator with per-replicate substreams.
//
// Replicate i of an ensemble with master seed s draws from the xoshiro256**
// stream whose state is filled by splitmix64 starting from
// stream_seed(s, i) = mix(mix(s) + (i + 1) * golden). Streams depend only on
// (s, i), never on which worker runs the replicate.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace progeny::random {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + (index + 1) * golden_gamma);
}

class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr std::uint64_t operator()() noexcept { return mix64(state_ += golden_gamma); }

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm();
  }

  static constexpr Xoshiro256 from_state(const std::array<std::uint64_t, 4>& state) noexcept {
    Xoshiro256 g(0);
    g.s_ = state;
    return g;
  }

  static Xoshiro256 for_stream(std::uint64_t master, std::uint64_t index) noexcept {
    return Xoshiro256(stream_seed(master, index));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0, 1], 53 bits of resolution.
  double uniform_pos() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  // Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate. Implemented here rather than with
  // <random> so that streams are identical across standard libraries.
  double exponential(double rate) noexcept { return -std::log(uniform_pos()) / rate; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace progeny::random
