#pragma once

#include <cstdint>
#include <initializer_list>

namespace wsc {

// Seedable random stream. Every run and replica owns its own Rng derived
// from (master seed, run index, replica index); there is no global state.
//
// xoshiro256++ (Blackman and Vigna). std::mt19937_64 costs several times
// more per draw and dominated the Metropolis sweep.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;
  explicit Xoshiro256pp(std::uint64_t seed = 0) { this->seed(seed); }

  // State filled from a SplitMix64 sequence started at `seed`.
  void seed(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Draws are produced from the raw 64-bit engine output, so trajectories do not
// depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

  // Independent child stream; the parent is not advanced.
  Rng derive(std::initializer_list<std::uint64_t> stream) const;

  std::uint64_t next() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  // Uniform spin value -1 or +1.
  std::int8_t spin() { return (next() >> 63) ? std::int8_t{1} : std::int8_t{-1}; }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t mixed_;
  Xoshiro256pp engine_;
};

// SplitMix64 finalizer; used to combine seeds and stream indices.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace wsc
