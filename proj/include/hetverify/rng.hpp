#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace hetverify {

// Counter-based random streams: every shot owns an independent generator
// keyed by (seed, stream). Batches are therefore bit-identical regardless of
// how shots are partitioned across workers, and the output does not depend on
// the standard library's distribution implementations.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class ShotRng {
 public:
  ShotRng(uint64_t seed, uint64_t stream) {
    uint64_t init = seed ^ (stream * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL);
    s_[0] = splitmix64(init);
    s_[1] = splitmix64(init);
    s_[2] = splitmix64(init);
    s_[3] = splitmix64(init);
  }

  // xoshiro256++
  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe under log().
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential() { return -std::log(uniform_pos()); }

  // Gamma(shape, 1) for small integer shape, as a sum of exponentials.
  double gamma_int(int shape) {
    double prod = 1.0;
    for (int i = 0; i < shape; ++i) prod *= uniform_pos();
    return -std::log(prod);
  }

  // Uniformly distributed point on the unit circle (Marsaglia rejection;
  // avoids sincos in the hot path).
  std::complex<double> unit_circle() {
    for (;;) {
      double x = 2.0 * uniform() - 1.0;
      double y = 2.0 * uniform() - 1.0;
      double s = x * x + y * y;
      if (s > 0.0 && s <= 1.0) {
        double inv = 1.0 / std::sqrt(s);
        return {x * inv, y * inv};
      }
    }
  }

  // Standard complex Gaussian with density exp(-|z|^2)/pi: the heterodyne
  // distribution of the vacuum.
  std::complex<double> complex_gaussian() {
    return std::sqrt(exponential()) * unit_circle();
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace hetverify
