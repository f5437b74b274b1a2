#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "outperf/rng.hpp"

namespace outperf::policy {

inline constexpr std::size_t kNumFeatures = 3;

/// Weights of the two-layer allocation network. No bias terms. The flat
/// ordering (input weights row-major, then output weights row-major) is the
/// parameter vector the trainer optimizes.
struct Params {
  std::size_t hidden_width = 0;
  std::size_t n_assets = 0;
  std::vector<double> input_weights;   // kNumFeatures x hidden_width
  std::vector<double> output_weights;  // hidden_width x n_assets

  std::size_t size() const { return input_weights.size() + output_weights.size(); }
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);
  void validate() const;
};

/// Scale constants that map raw state onto network inputs.
struct FeatureScaling {
  double horizon_years = 1.0;  // T
  double wealth_norm = 1.0;    // total injected capital q*N (1 if that is 0)
};

/// The 3-feature state: ((T-t)/T, W/wealth_norm, W_b/wealth_norm), evaluated
/// at the pre-injection wealths of the decision time.
std::array<double, kNumFeatures> features(double t_years, double wealth, double benchmark_wealth,
                                          const FeatureScaling& scaling);

/// Hidden activations h_j = 1 / (1 + exp(sum_i F_i z_ij)). Note the sign
/// convention: the argument is not negated, so h -> 0 as the pre-activation
/// grows large. Values are clamped to the open interval (0, 1).
void hidden_layer(std::span<const double> feats, const Params& params, std::span<double> hidden);

/// Allocation weights p = softmax(x^T h), computed with max-subtraction.
/// Every component lies in [0, 1] and the sum is 1 to machine precision,
/// so no-shorting and no-leverage hold structurally.
void allocate(std::span<const double> feats, const Params& params, std::span<double> weights);

/// Output stage alone, for callers that already hold the hidden activations.
void allocate_from_hidden(std::span<const double> hidden, const Params& params,
                          std::span<double> weights);

/// Convenience overload returning a fresh vector.
std::vector<double> allocate(std::span<const double> feats, const Params& params);

/// Weights i.i.d. uniform on [-scale, scale].
Params init_params(Rng& rng, double scale, std::size_t hidden_width, std::size_t n_assets);

/// Plain-text serialization: shape header then row-major values at 17
/// significant digits, which round-trips doubles bit-exactly.
void save_params(const Params& params, const std::string& path);
Params load_params(const std::string& path);

}  // namespace outperf::policy
