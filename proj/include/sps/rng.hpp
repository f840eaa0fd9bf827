#ifndef SPS_RNG_HPP
#define SPS_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

/**
 * \file
 * \brief Counter-based random streams.
 *
 * Every unit of random work (one particle in one M step, one group in one S
 * phase, ...) gets its own stream whose key is a hash of the run seed and the
 * coordinates of that unit. Results therefore never depend on how work is
 * scheduled across threads.
 */

namespace sps {

enum class StreamPhase : std::uint64_t {
  init = 1,
  selection = 2,
  mutation = 3,
  synthetic = 4,
  pass = 5,
};

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t hash_combine(std::uint64_t key, std::uint64_t value) noexcept {
  return mix64(key ^ mix64(value + kGoldenGamma));
}

constexpr std::uint64_t stream_key(std::uint64_t seed, StreamPhase phase, std::uint64_t cycle, std::uint64_t step,
                                   std::uint64_t group, std::uint64_t particle) noexcept {
  std::uint64_t key = mix64(seed + kGoldenGamma);
  key = hash_combine(key, static_cast<std::uint64_t>(phase));
  key = hash_combine(key, cycle);
  key = hash_combine(key, step);
  key = hash_combine(key, group);
  key = hash_combine(key, particle);
  return key;
}

/// SplitMix64 generator: output i is mix64(key + i * gamma).
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

 private:
  std::uint64_t state_;
  std::normal_distribution<double> normal_;
};

}  // namespace sps

#endif
