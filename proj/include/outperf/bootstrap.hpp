#pragma once

#include <cstdint>
#include <vector>

#include "outperf/market_data.hpp"
#include "outperf/rng.hpp"

namespace outperf::bootstrap {

enum class Mode { fixed, stationary };

/// Block bootstrap settings. Lengths are in months (the resolution of the
/// source panel); compounding to rebalance periods happens afterwards.
struct Config {
  Mode mode = Mode::stationary;
  double expected_blocksize = 6.0;  // b for fixed (integer-valued), b-hat for stationary
  std::size_t path_length = 360;    // months per resampled path

  void validate() const;
};

/// Draws a block length from the shifted geometric with mean `expected`.
/// expected == 1 always yields 1.
std::uint64_t sample_blocksize(double expected, Rng& rng);

/// Core resampling step: the row indices a resampled path reads from a
/// source of `n_rows` observations. Each block starts uniformly at random,
/// runs for a geometric (stationary) or constant (fixed) length, wraps
/// circularly past the last row, and the final block is truncated at the
/// target length.
std::vector<std::size_t> sample_indices(std::size_t n_rows, const Config& config, Rng& rng);

/// One resampled monthly path: panel rows gathered at sample_indices, the
/// same rows across all assets.
Matrix resample_path(const AssetPanel& panel, const Config& config, Rng& rng);

/// L independent monthly paths. Path i uses the RNG stream (seed, i), so the
/// output is identical for any worker count.
PathSet resample_set(const AssetPanel& panel, const Config& config, std::size_t n_paths,
                     std::uint64_t seed, int workers = 1);

/// A probability small enough to underflow double; the log is canonical.
struct LogProbability {
  double log_value = 0.0;  // natural log
  double value() const;    // exp(log_value), may flush to 0
  double log10() const;
};

/// Chance that two independent fixed-block resampled paths of length N from
/// N_tot distinct observations coincide elementwise, for blocksizes b1 and
/// b2. Requires b1 | N and b2 | N.
LogProbability prob_identical_fixed(std::uint64_t n, std::uint64_t n_tot, std::uint64_t b1,
                                    std::uint64_t b2);

/// Same-path probability for the stationary bootstrap with expected
/// blocksizes b1 and b2 (both >= 1):
///   (1/N_tot) * ((1-1/b1)(1-1/b2) + (1/b1 + 1/b2 - 1/(b1*b2)) / N_tot)^(N-1)
/// The middle term is 1 - (1-1/b1)(1-1/b2), i.e. symmetric in b1, b2.
LogProbability prob_identical_stationary(std::uint64_t n, std::uint64_t n_tot, double b1,
                                         double b2);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

/// Brute-force check of the identical-path probabilities: resamples pairs of
/// paths over an alphabet of n_tot distinct symbols and counts elementwise
/// matches. Intended for tiny N only.
McEstimate mc_prob_identical(const Config& config1, const Config& config2, std::size_t n_tot,
                             std::uint64_t trials, Rng& rng);

}  // namespace outperf::bootstrap
