#include "outperf/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "outperf/io.hpp"

namespace outperf::policy {

std::vector<double> Params::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), input_weights.begin(), input_weights.end());
  flat.insert(flat.end(), output_weights.begin(), output_weights.end());
  return flat;
}

void Params::assign_flat(std::span<const double> flat) {
  if (flat.size() != size()) throw shape_error("policy: flat vector has wrong length");
  std::copy_n(flat.begin(), input_weights.size(), input_weights.begin());
  std::copy_n(flat.begin() + input_weights.size(), output_weights.size(), output_weights.begin());
}

void Params::validate() const {
  if (hidden_width == 0 || n_assets == 0) throw shape_error("policy: empty layer");
  if (input_weights.size() != kNumFeatures * hidden_width ||
      output_weights.size() != hidden_width * n_assets) {
    throw shape_error("policy: weight shapes inconsistent");
  }
  for (double w : input_weights) {
    if (!std::isfinite(w)) throw parameter_error("policy: non-finite input weight");
  }
  for (double w : output_weights) {
    if (!std::isfinite(w)) throw parameter_error("policy: non-finite output weight");
  }
}

std::array<double, kNumFeatures> features(double t_years, double wealth, double benchmark_wealth,
                                          const FeatureScaling& scaling) {
  const double horizon = scaling.horizon_years > 0.0 ? scaling.horizon_years : 1.0;
  const double norm = scaling.wealth_norm > 0.0 ? scaling.wealth_norm : 1.0;
  return {(horizon - t_years) / horizon, wealth / norm, benchmark_wealth / norm};
}

void hidden_layer(std::span<const double> feats, const Params& params, std::span<double> hidden) {
  if (feats.size() != kNumFeatures || hidden.size() != params.hidden_width) {
    throw shape_error("hidden_layer: shape mismatch");
  }
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  for (std::size_t j = 0; j < params.hidden_width; ++j) {
    double u = 0.0;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      u += feats[i] * params.input_weights[i * params.hidden_width + j];
    }
    // sigma(u) = 1/(1 + e^u); saturation clamps keep h strictly inside (0,1).
    hidden[j] = std::clamp(1.0 / (1.0 + std::exp(u)), lo, hi);
  }
}

void allocate_from_hidden(std::span<const double> hidden, const Params& params,
                          std::span<double> weights) {
  if (hidden.size() != params.hidden_width || weights.size() != params.n_assets) {
    throw shape_error("allocate_from_hidden: shape mismatch");
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < params.n_assets; ++m) {
    double o = 0.0;
    for (std::size_t k = 0; k < params.hidden_width; ++k) {
      o += params.output_weights[k * params.n_assets + m] * hidden[k];
    }
    weights[m] = o;
    max_logit = std::max(max_logit, o);
  }
  double total = 0.0;
  for (std::size_t m = 0; m < params.n_assets; ++m) {
    weights[m] = std::exp(weights[m] - max_logit);
    total += weights[m];
  }
  for (std::size_t m = 0; m < params.n_assets; ++m) weights[m] /= total;
}

void allocate(std::span<const double> feats, const Params& params, std::span<double> weights) {
  std::vector<double> hidden(params.hidden_width);
  hidden_layer(feats, params, hidden);
  allocate_from_hidden(hidden, params, weights);
}

std::vector<double> allocate(std::span<const double> feats, const Params& params) {
  std::vector<double> weights(params.n_assets);
  allocate(feats, params, weights);
  return weights;
}

Params init_params(Rng& rng, double scale, std::size_t hidden_width, std::size_t n_assets) {
  if (!(scale > 0.0)) throw parameter_error("init_params: scale must be > 0");
  Params p;
  p.hidden_width = hidden_width;
  p.n_assets = n_assets;
  p.input_weights.resize(kNumFeatures * hidden_width);
  p.output_weights.resize(hidden_width * n_assets);
  for (double& w : p.input_weights) w = (2.0 * rng.uniform01() - 1.0) * scale;
  for (double& w : p.output_weights) w = (2.0 * rng.uniform01() - 1.0) * scale;
  p.validate();
  return p;
}

void save_params(const Params& params, const std::string& path) {
  params.validate();
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "outperf-policy 1\n";
  out << kNumFeatures << ' ' << params.hidden_width << ' ' << params.n_assets << '\n';
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    for (std::size_t j = 0; j < params.hidden_width; ++j) {
      out << (j ? " " : "") << io::format_double(params.input_weights[i * params.hidden_width + j]);
    }
    out << '\n';
  }
  for (std::size_t k = 0; k < params.hidden_width; ++k) {
    for (std::size_t m = 0; m < params.n_assets; ++m) {
      out << (m ? " " : "") << io::format_double(params.output_weights[k * params.n_assets + m]);
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

Params load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "outperf-policy" || version != 1) {
    throw parse_error(path + ": not an outperf policy file");
  }
  std::size_t d = 0, l = 0, m = 0;
  in >> d >> l >> m;
  if (!in || d != kNumFeatures || l == 0 || m == 0) {
    throw parse_error(path + ": bad shape header");
  }
  Params p;
  p.hidden_width = l;
  p.n_assets = m;
  p.input_weights.resize(d * l);
  p.output_weights.resize(l * m);
  for (double& w : p.input_weights) in >> w;
  for (double& w : p.output_weights) in >> w;
  if (!in) throw parse_error(path + ": truncated weight data");
  p.validate();
  return p;
}

}  // namespace outperf::policy
