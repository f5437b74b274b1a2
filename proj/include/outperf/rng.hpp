#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "outperf/errors.hpp"

namespace outperf {

/// Seedable random generator with explicitly implemented distribution
/// transforms. std::mt19937_64 output is pinned by the standard, and none of
/// the std::*_distribution adaptors are, so every transform lives here: a
/// given (seed, call sequence) produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Generator for an independent numbered stream (one per path). The stream
  /// seed is derived from (master, stream) with a SplitMix64 mix so that
  /// nearby stream indices do not produce correlated engine states.
  static Rng for_stream(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t x = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return Rng(x);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer on [0, n). Rejection sampling, exactly unbiased.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw parameter_error("uniform_index: empty range");
    const std::uint64_t m = static_cast<std::uint64_t>(n);
    const std::uint64_t reject_from = UINT64_MAX - (UINT64_MAX % m + 1) % m;
    std::uint64_t x = gen_();
    while (reject_from != UINT64_MAX && x > reject_from) x = gen_();
    return static_cast<std::size_t>(x % m);
  }

  /// Standard normal via Box-Muller. The second variate is discarded so the
  /// draw count per call is fixed.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    if (!(rate > 0.0)) throw parameter_error("exponential: rate must be > 0");
    return -std::log(1.0 - uniform01()) / rate;
  }

  /// Poisson count with the given mean. Multiplication method, chunked so
  /// that exp(-mean) never underflows for large means.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw parameter_error("poisson: mean must be >= 0");
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = mean > 500.0 ? 500.0 : mean;
      mean -= chunk;
      const double floor = std::exp(-chunk);
      double prod = 1.0;
      std::uint64_t k = 0;
      do {
        ++k;
        prod *= 1.0 - uniform01();  // (0, 1]
      } while (prod > floor);
      total += k - 1;
    }
    return total;
  }

  /// Shifted geometric on {1, 2, ...} with P[k] = (1-p)^{k-1} p, mean 1/p.
  std::uint64_t geometric_shifted(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw parameter_error("geometric_shifted: p must be in (0, 1]");
    if (p == 1.0) return 1;
    // Inversion: k = 1 + floor(log(1-u) / log(1-p)), u in [0, 1).
    const double k = std::floor(std::log1p(-uniform01()) / std::log1p(-p));
    return 1 + static_cast<std::uint64_t>(k);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace outperf
