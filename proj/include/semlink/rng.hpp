// SPDX-License-Identifier: Apache-2.0

#ifndef SEMLINK_RNG_HPP
#define SEMLINK_RNG_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace semlink {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. The n-th output is a pure function of
/// (key, n), and child streams are keyed by hashing the parent key with a
/// tag, so any (seed, snr index, trial, stage) tuple names one stream
/// regardless of the order in which streams are consumed.
///
/// Satisfies UniformRandomBitGenerator, so the standard distributions
/// can draw from it directly.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key) noexcept : key_(mix64(key)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return mix64(key_ ^ mix64(counter_++));
  }

  RngStream derive(std::uint64_t tag) const noexcept {
    return RngStream(key_ ^ mix64(tag ^ 0x5851f42d4c957f2dULL));
  }
  RngStream derive(std::initializer_list<std::uint64_t> tags) const noexcept {
    RngStream s = *this;
    for (auto t : tags) s = s.derive(t);
    return s;
  }

  std::uint64_t key() const noexcept { return key_; }

  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Standard normal.
  double normal();
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace semlink

#endif  // SEMLINK_RNG_HPP
