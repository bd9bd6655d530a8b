#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, counter), so trials can run in any order on any thread.

#include <cstdint>

namespace percoplane {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0,1) from 53 random bits.
inline constexpr double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(stream_key(seed, stream)) {}

  std::uint64_t operator()() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  double uniform() { return to_unit((*this)()); }

  /// Unbiased integer in [0, n) (Lemire's multiply-and-reject).
  std::uint64_t bounded(std::uint64_t n) {
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform in [0,1) attached to one (seed, trial, element) triple.
inline double element_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t element) {
  return to_unit(mix64(stream_key(seed, trial) ^ mix64(element + 0x5851f42d4c957f2dULL)));
}

}  // namespace percoplane
