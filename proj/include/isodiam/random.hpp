#pragma once

// Counter-based random streams. Every sample i of a stream owns an engine
// derived from (seed, stream id, i), so results never depend on how work is
// split across threads.

#include <cstdint>
#include <limits>
#include <random>

namespace isodiam {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64; satisfies UniformRandomBitGenerator.
class Engine {
 public:
  using result_type = std::uint64_t;
  explicit Engine(std::uint64_t state) noexcept : state_(state) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(*this); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(*this); }

 private:
  std::uint64_t state_;
};

class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t id = 0) noexcept : key_(mix64(mix64(seed) ^ mix64(~id))) {}

  Engine engine(std::uint64_t index) const noexcept { return Engine(mix64(key_ ^ mix64(index + 0x632be59bd9b4e019ULL))); }
  Stream substream(std::uint64_t id) const noexcept { return Stream(key_, id); }
  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

/// Stream ids used across the library. Keeping them in one place keeps the
/// seed -> output mapping documented.
/// Independent seed number `index` of stream `stream` under `seed`.
inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Stream(seed, stream).engine(index)();
}

namespace streams {
inline constexpr std::uint64_t kSample = 1;
inline constexpr std::uint64_t kVolume = 2;
inline constexpr std::uint64_t kFlow = 3;
inline constexpr std::uint64_t kIdentity = 4;
inline constexpr std::uint64_t kStrategy = 5;
inline constexpr std::uint64_t kReference = 6;
inline constexpr std::uint64_t kTrial = 7;
inline constexpr std::uint64_t kProbe = 8;
inline constexpr std::uint64_t kRebase = 9;
inline constexpr std::uint64_t kGreedy = 10;
inline constexpr std::uint64_t kHull = 11;
}  // namespace streams

}  // namespace isodiam
