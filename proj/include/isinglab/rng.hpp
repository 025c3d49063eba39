#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace isinglab {

namespace detail {

// SplitMix64 finalizer (Steele/Lea/Flood). Bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

// Counter-based random stream: output(k) = mix64(key ^ k * golden), so the
// generator is a pure function of (key, position). Stream keys are derived
// from (seed, stream_id) with two mixing rounds; distinct (seed, stream_id)
// pairs give unrelated keys, which is what lets shard counts change without
// correlating shard streams.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // The documented splitting rule: key = mix64(mix64(seed + phi) ^ (id + phi)).
  static CounterRng stream(std::uint64_t seed, std::uint64_t stream_id) {
    using detail::kGolden;
    using detail::mix64;
    return CounterRng(mix64(mix64(seed + kGolden) ^ (stream_id + kGolden)));
  }

  std::uint64_t next_u64() { return detail::mix64(key_ ^ (++counter_ * detail::kGolden)); }

  // UniformRandomBitGenerator interface.
  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

  // Uniform double in [0, 1), 53 significant bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Exp(rate) via inversion on a bin-centered uniform in (0, 1): the draw is
  // strictly positive, so Poisson(0) below is exactly 0.
  double exponential(double rate = 1.0) {
    const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(u) / rate;
  }

  int fair_sign() { return (next_u64() >> 63) ? 1 : -1; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Poisson count via unit-exponential arrivals; exact for any mean >= 0.
  long long poisson(double mean) {
    long long k = 0;
    double acc = exponential();
    while (acc <= mean) {
      ++k;
      acc += exponential();
    }
    return k;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace isinglab
