#pragma once

#include <cmath>
#include <cstdint>

namespace dsf {

// splitmix64 finalizer; used both as a hash mixer and as the per-cell
// generator step so that every cell's point realization is a pure function
// of (global seed, cell index).
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
  return mix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// Small counter-based PRNG. Streams with different seeds are independent for
// all practical purposes and the sequence is reproducible regardless of what
// other streams were consumed.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : state_(mix64(seed ^ 0xd1b54a32d192ed03ULL)) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  // Exact Poisson sample by Knuth's product method, chunked so the running
  // product never underflows for the means used here.
  long poisson(double mean) {
    long total = 0;
    while (mean > 30.0) {
      total += poisson_small(30.0);
      mean -= 30.0;
    }
    return total + poisson_small(mean);
  }

 private:
  long poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = next_double();
    while (prod > limit) {
      ++k;
      prod *= next_double();
    }
    return k;
  }

  uint64_t state_;
};

}  // namespace dsf
