#pragma once

#include <cstdint>
#include <random>

namespace qgkd {

// Explicit-seed splittable generator. Passed by value into every stochastic
// operation; there is no ambient global randomness anywhere in the library.
// split(tag) derives an independent stream deterministically, so parallel
// consumers can be given disjoint generators from one session seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  Rng split(std::uint64_t tag) const { return Rng(mix(seed_ ^ (tag * 0x9e3779b97f4a7c15ULL))); }

  std::uint64_t seed() const { return seed_; }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::uint64_t binomial(std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return static_cast<std::uint64_t>(
        std::binomial_distribution<long long>(static_cast<long long>(n), p)(engine_));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qgkd
