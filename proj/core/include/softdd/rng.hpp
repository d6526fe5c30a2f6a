#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace softdd {

// Deterministic random source. mt19937_64 output is pinned by the standard,
// and all derived draws below avoid std distributions (whose algorithms are
// implementation-defined), so identical seeds give identical streams on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be > 0; modulo bias is irrelevant here.
  std::uint64_t uniform(std::uint64_t n) { return next() % n; }

  // Uniform integer in [lo, hi], inclusive.
  long long uniform_int(long long lo, long long hi) {
    return lo + static_cast<long long>(uniform(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform real in [0, 1).
  double uniform_real() { return std::ldexp(static_cast<double>(next() >> 11), -53); }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  bool bernoulli(double p) { return uniform_real() < p; }

  // Independent child stream derived from the original seed, stable under
  // reordering of sibling forks.
  Rng fork(std::uint64_t stream) const {
    return Rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace softdd
