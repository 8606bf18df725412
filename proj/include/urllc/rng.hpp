#pragma once

#include <cmath>
#include <cstdint>

namespace urllc {

// Deterministic random streams. xoshiro256** seeded through splitmix64,
// so the same (seed, child path) yields the same draw sequence on every
// platform. All randomness in the toolkit flows through explicit streams
// owned by the caller; there is no global generator.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
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

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform strictly inside (0, 1); safe as a log() argument.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Marsaglia polar method with a cached spare. Draw order is part of the
  // determinism contract, so no rejection-free shortcut.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  // Exponential with the given mean; strictly positive.
  double exponential(double mean) { return -mean * std::log(uniform_open()); }

  // Knuth product method; fine for the small means used here (<= ~10).
  int poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

  // Independent child stream addressed by (original seed, tag), not by the
  // current state, so stream layout is stable however the parent is used.
  RngStream child(std::uint64_t tag) const {
    std::uint64_t sm = seed_ ^ (0x632be59bd9b4e019ULL + tag * 0x9e3779b97f4a7c15ULL);
    splitmix64(sm);
    return RngStream(splitmix64(sm));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace urllc
