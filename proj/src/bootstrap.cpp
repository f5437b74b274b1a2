#include "outperf/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "parallel.hpp"

namespace outperf::bootstrap {

void Config::validate() const {
  if (path_length == 0) throw parameter_error("bootstrap: path_length must be >= 1");
  if (mode == Mode::stationary) {
    if (!(expected_blocksize >= 1.0)) {
      throw parameter_error("bootstrap: expected blocksize must be >= 1");
    }
  } else {
    if (!(expected_blocksize >= 1.0) || expected_blocksize != std::floor(expected_blocksize)) {
      throw parameter_error("bootstrap: fixed blocksize must be a positive integer");
    }
  }
}

std::uint64_t sample_blocksize(double expected, Rng& rng) {
  if (!(expected >= 1.0)) throw parameter_error("sample_blocksize: expected blocksize must be >= 1");
  return rng.geometric_shifted(1.0 / expected);
}

std::vector<std::size_t> sample_indices(std::size_t n_rows, const Config& config, Rng& rng) {
  config.validate();
  if (n_rows == 0) throw parameter_error("sample_indices: empty source");

  std::vector<std::size_t> indices;
  indices.reserve(config.path_length);
  while (indices.size() < config.path_length) {
    const std::size_t start = rng.uniform_index(n_rows);
    const std::uint64_t blocksize = config.mode == Mode::stationary
                                        ? sample_blocksize(config.expected_blocksize, rng)
                                        : static_cast<std::uint64_t>(config.expected_blocksize);
    for (std::uint64_t i = 0; i < blocksize && indices.size() < config.path_length; ++i) {
      indices.push_back((start + i) % n_rows);  // circular wrap past the last row
    }
  }
  return indices;
}

Matrix resample_path(const AssetPanel& panel, const Config& config, Rng& rng) {
  const auto indices = sample_indices(panel.returns.rows, config, rng);
  Matrix out(indices.size(), panel.returns.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = panel.returns.row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

PathSet resample_set(const AssetPanel& panel, const Config& config, std::size_t n_paths,
                     std::uint64_t seed, int workers) {
  config.validate();
  panel.validate();
  if (n_paths == 0) throw parameter_error("resample_set: path count must be >= 1");

  PathSet set;
  set.n_paths = n_paths;
  set.n_periods = config.path_length;
  set.n_assets = panel.returns.cols;
  set.asset_names = panel.asset_names;
  set.data.resize(n_paths * set.n_periods * set.n_assets);
  set.provenance.kind = "bootstrap";
  set.provenance.seed = seed;
  set.provenance.config["mode"] = config.mode == Mode::stationary ? "stationary" : "fixed";
  set.provenance.config["expected_blocksize_months"] = std::to_string(config.expected_blocksize);
  set.provenance.config["path_length_months"] = std::to_string(config.path_length);
  char checksum[32];
  std::snprintf(checksum, sizeof checksum, "%016llx",
                static_cast<unsigned long long>(panel_checksum(panel)));
  set.provenance.config["source_checksum"] = checksum;

  // Each path draws from its own stream, so the layout is identical for any
  // worker count.
  detail::run_over_paths(n_paths, workers, [&](std::size_t l) {
    Rng rng = Rng::for_stream(seed, l);
    const Matrix path = resample_path(panel, config, rng);
    std::copy(path.data.begin(), path.data.end(), set.path_block(l).begin());
  });
  return set;
}

double LogProbability::value() const { return std::exp(log_value); }
double LogProbability::log10() const { return log_value / std::numbers::ln10; }

LogProbability prob_identical_fixed(std::uint64_t n, std::uint64_t n_tot, std::uint64_t b1,
                                    std::uint64_t b2) {
  if (n == 0 || n_tot == 0) throw parameter_error("prob_identical_fixed: N and N_tot must be >= 1");
  if (b1 == 0 || b2 == 0 || n % b1 != 0 || n % b2 != 0) {
    throw parameter_error("prob_identical_fixed: blocksizes must divide the path length");
  }
  const std::uint64_t blocks = std::lcm(n / b1, n / b2);
  return {-static_cast<double>(blocks) * std::log(static_cast<double>(n_tot))};
}

LogProbability prob_identical_stationary(std::uint64_t n, std::uint64_t n_tot, double b1,
                                         double b2) {
  if (n == 0 || n_tot == 0) {
    throw parameter_error("prob_identical_stationary: N and N_tot must be >= 1");
  }
  if (!(b1 >= 1.0) || !(b2 >= 1.0)) {
    throw parameter_error("prob_identical_stationary: expected blocksizes must be >= 1");
  }
  // (1/N_tot) * (e^{-(l1+l2)} + (1 - e^{-(l1+l2)})/N_tot)^{N-1} with
  // e^{-li} = 1 - 1/bi. The complement 1 - same_block equals the expanded
  // middle term 1/b1 + 1/b2 - 1/(b1 b2) and is exact at the b = 1 edge.
  const double nt = static_cast<double>(n_tot);
  const double same_block = (1.0 - 1.0 / b1) * (1.0 - 1.0 / b2);
  const double new_block = 1.0 - same_block;
  const double inner = same_block + new_block / nt;
  return {-std::log(nt) + static_cast<double>(n - 1) * std::log(inner)};
}

McEstimate mc_prob_identical(const Config& config1, const Config& config2, std::size_t n_tot,
                             std::uint64_t trials, Rng& rng) {
  config1.validate();
  config2.validate();
  if (n_tot == 0) throw parameter_error("mc_prob_identical: alphabet must be nonempty");
  if (trials == 0) throw parameter_error("mc_prob_identical: trials must be >= 1");
  if (config1.path_length != config2.path_length) {
    throw parameter_error("mc_prob_identical: path lengths differ");
  }

  // Distinct observations make symbol sequences equal exactly when the
  // sampled row indices are equal, so the paths never need materializing.
  const std::size_t n = config1.path_length;
  std::vector<std::size_t> p1(n), p2(n);
  std::uint64_t matches = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    p1 = sample_indices(n_tot, config1, rng);
    p2 = sample_indices(n_tot, config2, rng);
    if (p1 == p2) ++matches;
  }
  const double estimate = static_cast<double>(matches) / static_cast<double>(trials);
  const double std_error = std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
  return {estimate, std_error, trials};
}

}  // namespace outperf::bootstrap
