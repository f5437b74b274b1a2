#include "outperf/objective.hpp"

#include <cmath>
#include <numeric>

#include "parallel.hpp"

namespace outperf::objective {

namespace {

// Paths are reduced in fixed-size chunks combined in chunk order, so sums are
// bit-identical for every worker count.
constexpr std::size_t kChunk = 256;

}  // namespace

void InvestmentSpec::validate() const {
  if (n_periods == 0) throw parameter_error("spec: n_periods must be >= 1");
  if (!(horizon_years > 0.0)) throw parameter_error("spec: horizon must be > 0");
  if (!(injection >= 0.0)) throw parameter_error("spec: injection must be >= 0");
  if (!(epsilon > 0.0)) throw parameter_error("spec: epsilon must be > 0");
  if (!(spread >= 0.0)) throw parameter_error("spec: spread must be >= 0");
  if (benchmark_weights.empty()) throw parameter_error("spec: benchmark weights missing");
  double total = 0.0;
  for (double w : benchmark_weights) {
    if (!(w >= 0.0)) throw parameter_error("spec: benchmark weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw parameter_error("spec: benchmark weights must sum to 1");
}

double InvestmentSpec::elevated_multiplier() const {
  return std::exp(effective_spread() * horizon_years);
}

double InvestmentSpec::wealth_norm() const {
  const double norm = injection * static_cast<double>(n_periods);
  return norm > 0.0 ? norm : 1.0;
}

std::vector<double> Trajectories::terminal(bool adaptive_strategy) const {
  const Matrix& m = adaptive_strategy ? adaptive : benchmark;
  std::vector<double> out(n_paths);
  for (std::size_t l = 0; l < n_paths; ++l) out[l] = m.at(l, n_periods);
  return out;
}

double g(double x) {
  const double below = std::min(x, 0.0);
  return below * below + std::max(x, 0.0);
}

double g_bar(double x, double eps) {
  if (!(eps > 0.0)) throw parameter_error("g_bar: epsilon must be > 0");
  if (x > eps) return x;
  if (x < -eps) return (x + eps) * (x + eps);
  return x * x / (4.0 * eps) + 0.5 * x + 0.25 * eps;
}

double g_bar_prime(double x, double eps) {
  if (!(eps > 0.0)) throw parameter_error("g_bar_prime: epsilon must be > 0");
  if (x > eps) return 1.0;
  if (x < -eps) return 2.0 * (x + eps);
  return x / (2.0 * eps) + 0.5;
}

namespace {

struct ForwardScratch {
  std::vector<double> feats;   // N x 3
  std::vector<double> hidden;  // N x l
  std::vector<double> alloc;   // N x M
  std::vector<double> growth;  // N, p^T R
  std::vector<double> invested;  // N, W(t_n^-) + q

  void resize(std::size_t n, std::size_t l, std::size_t m) {
    feats.resize(n * policy::kNumFeatures);
    hidden.resize(n * l);
    alloc.resize(n * m);
    growth.resize(n);
    invested.resize(n);
  }
};

struct PathCheck {
  static void run(const policy::Params& params, const PathSet& paths, const InvestmentSpec& spec) {
    spec.validate();
    params.validate();
    if (paths.n_paths == 0) throw parameter_error("objective: empty path set");
    if (paths.n_assets != params.n_assets) {
      throw shape_error("objective: path set has " + std::to_string(paths.n_assets) +
                        " assets, policy expects " + std::to_string(params.n_assets));
    }
    if (paths.n_assets != spec.benchmark_weights.size()) {
      throw shape_error("objective: benchmark weights do not match asset count");
    }
    if (paths.n_periods != spec.n_periods) {
      throw shape_error("objective: path set has " + std::to_string(paths.n_periods) +
                        " periods, spec expects " + std::to_string(spec.n_periods));
    }
  }
};

/// One adaptive+benchmark forward pass with stage records kept in `scratch`.
/// The full trajectory is stored only when `out` is supplied.
void forward_path(const policy::Params& params, const PathSet& paths, const InvestmentSpec& spec,
                  std::size_t path, double& terminal_adaptive, double& terminal_benchmark,
                  ForwardScratch& scratch, Trajectories* out) {
  const std::size_t n_periods = spec.n_periods;
  const std::size_t n_assets = paths.n_assets;
  const double dt = spec.horizon_years / static_cast<double>(n_periods);
  const policy::FeatureScaling scaling = spec.scaling();

  double wealth = 0.0;  // W(t_n^-), zero before the first injection
  double bench = 0.0;

  for (std::size_t n = 0; n < n_periods; ++n) {
    const auto feats = policy::features(static_cast<double>(n) * dt, wealth, bench, scaling);
    std::copy(feats.begin(), feats.end(), scratch.feats.begin() + n * policy::kNumFeatures);
    const std::span<double> hidden{scratch.hidden.data() + n * params.hidden_width,
                                   params.hidden_width};
    const std::span<double> alloc{scratch.alloc.data() + n * n_assets, n_assets};
    policy::hidden_layer(feats, params, hidden);
    policy::allocate_from_hidden(hidden, params, alloc);

    const auto r = paths.period_returns(path, n);
    double growth = 0.0;
    double bench_growth = 0.0;
    for (std::size_t m = 0; m < n_assets; ++m) {
      growth += alloc[m] * r[m];
      bench_growth += spec.benchmark_weights[m] * r[m];
    }
    const double invested = wealth + spec.injection;
    const double bench_invested = bench + spec.injection;
    scratch.growth[n] = growth;
    scratch.invested[n] = invested;
    if (out) {
      out->adaptive.at(path, n) = invested;
      out->benchmark.at(path, n) = bench_invested;
      std::copy(alloc.begin(), alloc.end(),
                out->allocations.begin() + (path * n_periods + n) * n_assets);
    }
    wealth = growth * invested;
    bench = bench_growth * bench_invested;
  }
  terminal_adaptive = wealth;
  terminal_benchmark = bench;
  if (out) {
    out->adaptive.at(path, n_periods) = wealth;
    out->benchmark.at(path, n_periods) = bench;
  }
}

double penalty(double diff, const InvestmentSpec& spec) {
  if (spec.mode == Mode::asymmetric) return g_bar(diff, spec.epsilon);
  const double below = std::min(diff, 0.0);
  return below * below;
}

double penalty_prime(double diff, const InvestmentSpec& spec) {
  if (spec.mode == Mode::asymmetric) return g_bar_prime(diff, spec.epsilon);
  return 2.0 * std::min(diff, 0.0);
}

}  // namespace

Trajectories simulate_wealth(const policy::Params& params, const PathSet& paths,
                             const InvestmentSpec& spec) {
  PathCheck::run(params, paths, spec);
  Trajectories out;
  out.n_paths = paths.n_paths;
  out.n_periods = spec.n_periods;
  out.n_assets = paths.n_assets;
  out.adaptive = Matrix(paths.n_paths, spec.n_periods + 1);
  out.benchmark = Matrix(paths.n_paths, spec.n_periods + 1);
  out.allocations.resize(paths.n_paths * spec.n_periods * paths.n_assets);
  ForwardScratch scratch;
  scratch.resize(spec.n_periods, params.hidden_width, paths.n_assets);
  for (std::size_t l = 0; l < paths.n_paths; ++l) {
    double wt = 0.0, wb = 0.0;
    forward_path(params, paths, spec, l, wt, wb, scratch, &out);
  }
  return out;
}

double sample_objective(const policy::Params& params, const PathSet& paths,
                        const InvestmentSpec& spec, int workers) {
  PathCheck::run(params, paths, spec);
  const double target_mult = spec.elevated_multiplier();
  const std::size_t n_chunks = (paths.n_paths + kChunk - 1) / kChunk;
  std::vector<double> chunk_sum(n_chunks, 0.0);

  detail::run_over_paths(n_chunks, workers, [&](std::size_t c) {
    ForwardScratch scratch;
    scratch.resize(spec.n_periods, params.hidden_width, paths.n_assets);
    double sum = 0.0;
    const std::size_t hi = std::min(paths.n_paths, (c + 1) * kChunk);
    for (std::size_t l = c * kChunk; l < hi; ++l) {
      double wt = 0.0, wb = 0.0;
      forward_path(params, paths, spec, l, wt, wb, scratch, nullptr);
      sum += penalty(wt - target_mult * wb, spec);
    }
    chunk_sum[c] = sum;
  });

  double total = 0.0;
  for (double s : chunk_sum) total += s;
  return total / static_cast<double>(paths.n_paths);
}

double value_and_gradient(const policy::Params& params, const PathSet& paths,
                          const InvestmentSpec& spec, std::vector<double>& grad, int workers) {
  PathCheck::run(params, paths, spec);
  const std::size_t n_periods = spec.n_periods;
  const std::size_t n_assets = paths.n_assets;
  const std::size_t width = params.hidden_width;
  const std::size_t n_z = policy::kNumFeatures * width;
  const std::size_t n_params = n_z + width * n_assets;
  const double target_mult = spec.elevated_multiplier();
  const double inv_norm = 1.0 / spec.wealth_norm();

  const std::size_t n_chunks = (paths.n_paths + kChunk - 1) / kChunk;
  std::vector<double> chunk_value(n_chunks, 0.0);
  std::vector<std::vector<double>> chunk_grad(n_chunks);

  detail::run_over_paths(n_chunks, workers, [&](std::size_t c) {
    ForwardScratch scratch;
    scratch.resize(n_periods, width, n_assets);
    std::vector<double> acc(n_params, 0.0);
    std::vector<double> logit_bar(n_assets);
    std::vector<double> hidden_bar(width);
    double value = 0.0;

    const std::size_t hi = std::min(paths.n_paths, (c + 1) * kChunk);
    for (std::size_t l = c * kChunk; l < hi; ++l) {
      double wt = 0.0, wb = 0.0;
      forward_path(params, paths, spec, l, wt, wb, scratch, nullptr);
      const double diff = wt - target_mult * wb;
      value += penalty(diff, spec);

      // Reverse sweep through W_{n+1} = G_n (W_n + q), where G_n depends on
      // the weights directly and on W_n through the wealth feature.
      double wealth_bar = penalty_prime(diff, spec);
      for (std::size_t n = n_periods; n-- > 0;) {
        if (wealth_bar == 0.0) break;
        const double* feats = scratch.feats.data() + n * policy::kNumFeatures;
        const double* hidden = scratch.hidden.data() + n * width;
        const double* alloc = scratch.alloc.data() + n * n_assets;
        const auto r = paths.period_returns(l, n);
        const double growth = scratch.growth[n];
        const double invested = scratch.invested[n];
        const double coef = wealth_bar * invested;  // adjoint of G_n

        // dG/d(logit_m) through the softmax: p_m (R_m - G).
        for (std::size_t m = 0; m < n_assets; ++m) {
          logit_bar[m] = alloc[m] * (r[m] - growth);
        }
        for (std::size_t k = 0; k < width; ++k) {
          double hb = 0.0;
          for (std::size_t m = 0; m < n_assets; ++m) {
            const double lb = logit_bar[m];
            acc[n_z + k * n_assets + m] += coef * lb * hidden[k];
            hb += lb * params.output_weights[k * n_assets + m];
          }
          // d h / d u for sigma(u) = 1/(1+e^u) is -h(1-h).
          hidden_bar[k] = hb * (-hidden[k] * (1.0 - hidden[k]));
        }
        double growth_wealth = 0.0;  // dG/dW_n via the wealth feature
        for (std::size_t i = 0; i < policy::kNumFeatures; ++i) {
          const double fi = feats[i];
          for (std::size_t k = 0; k < width; ++k) {
            acc[i * width + k] += coef * hidden_bar[k] * fi;
          }
        }
        for (std::size_t k = 0; k < width; ++k) {
          growth_wealth += hidden_bar[k] * params.input_weights[1 * width + k];
        }
        growth_wealth *= inv_norm;
        wealth_bar = wealth_bar * growth + coef * growth_wealth;
      }
    }
    chunk_value[c] = value;
    chunk_grad[c] = std::move(acc);
  });

  grad.assign(n_params, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    total += chunk_value[c];
    for (std::size_t j = 0; j < n_params; ++j) grad[j] += chunk_grad[c][j];
  }
  const double inv_l = 1.0 / static_cast<double>(paths.n_paths);
  for (double& gj : grad) gj *= inv_l;
  return total * inv_l;
}

std::vector<double> gradient(const policy::Params& params, const PathSet& paths,
                             const InvestmentSpec& spec, int workers) {
  std::vector<double> grad;
  value_and_gradient(params, paths, spec, grad, workers);
  return grad;
}

Matrix fd_hessian(const policy::Params& params, const PathSet& paths, const InvestmentSpec& spec,
                  double step, int workers) {
  if (!(step > 0.0)) throw parameter_error("fd_hessian: step must be > 0");
  PathCheck::run(params, paths, spec);
  const std::vector<double> flat = params.flatten();
  const std::size_t n = flat.size();
  policy::Params shifted = params;
  Matrix hess(n, n);
  std::vector<double> plus, minus, probe = flat;
  for (std::size_t j = 0; j < n; ++j) {
    probe[j] = flat[j] + step;
    shifted.assign_flat(probe);
    plus = gradient(shifted, paths, spec, workers);
    probe[j] = flat[j] - step;
    shifted.assign_flat(probe);
    minus = gradient(shifted, paths, spec, workers);
    probe[j] = flat[j];
    for (std::size_t i = 0; i < n; ++i) {
      hess.at(i, j) = (plus[i] - minus[i]) / (2.0 * step);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (hess.at(i, j) + hess.at(j, i));
      hess.at(i, j) = avg;
      hess.at(j, i) = avg;
    }
  }
  return hess;
}

}  // namespace outperf::objective
