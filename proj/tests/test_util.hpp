#pragma once

// Shared helpers for the unit and acceptance suites. The statistical oracles
// here (chi-square tail probability, sample moments) are deliberately
// independent of the library's own numerics.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "outperf/market_data.hpp"
#include "outperf/objective.hpp"
#include "outperf/policy.hpp"
#include "outperf/rng.hpp"

namespace testutil {

/// Path set of L x N x M positive returns, mildly lognormal around 1.
inline outperf::PathSet random_pathset(std::size_t n_paths, std::size_t n_periods,
                                       std::size_t n_assets, std::uint64_t seed,
                                       double vol = 0.15) {
  outperf::PathSet set;
  set.n_paths = n_paths;
  set.n_periods = n_periods;
  set.n_assets = n_assets;
  set.asset_names.resize(n_assets, "a");
  set.provenance.kind = "synthetic";
  set.data.resize(n_paths * n_periods * n_assets);
  outperf::Rng rng(seed);
  for (double& v : set.data) v = std::exp(vol * rng.normal());
  return set;
}

/// Path set where every return of every asset is `value`.
inline outperf::PathSet flat_pathset(std::size_t n_paths, std::size_t n_periods,
                                     std::size_t n_assets, double value = 1.0) {
  outperf::PathSet set;
  set.n_paths = n_paths;
  set.n_periods = n_periods;
  set.n_assets = n_assets;
  set.asset_names.resize(n_assets, "a");
  set.data.assign(n_paths * n_periods * n_assets, value);
  return set;
}

/// Policy whose output weights are zero: allocations are exactly uniform for
/// every input, independent of the hidden layer.
inline outperf::policy::Params uniform_policy(std::size_t hidden, std::size_t assets,
                                              std::uint64_t seed = 17) {
  outperf::Rng rng(seed);
  auto params = outperf::policy::init_params(rng, 0.5, hidden, assets);
  std::fill(params.output_weights.begin(), params.output_weights.end(), 0.0);
  return params;
}

/// Regularized upper incomplete gamma Q(a, x) by series / continued fraction.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
    return 1.0 - p;
  }
  // Lentz continued fraction for Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - log_gamma_a);
}

/// Chi-square upper-tail p-value.
inline double chi_square_pvalue(double statistic, std::size_t dof) {
  return gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

/// Goodness-of-fit p-value of observed counts in bins 1..K (bin K holds the
/// lumped tail) against the shifted geometric with success probability p.
inline double geometric_gof_pvalue(const std::vector<std::uint64_t>& counts, double p) {
  const std::size_t bins = counts.size();
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  double statistic = 0.0;
  double tail = 1.0;  // P[k >= current bin] = (1-p)^{bin-1}
  for (std::size_t bin = 1; bin <= bins; ++bin) {
    const double prob = bin < bins ? tail * p : tail;
    const double expected = prob * static_cast<double>(total);
    const double diff = static_cast<double>(counts[bin - 1]) - expected;
    statistic += diff * diff / expected;
    tail *= 1.0 - p;
  }
  return chi_square_pvalue(statistic, bins - 1);
}

/// Extended-precision re-implementation of the sample objective, written
/// directly from the model formulas and independent of the library path.
/// Long double keeps finite-difference quotients free of double roundoff.
inline long double objective_value_ld(const outperf::policy::Params& params,
                                      const outperf::PathSet& paths,
                                      const outperf::objective::InvestmentSpec& spec) {
  const std::size_t n_periods = spec.n_periods;
  const std::size_t n_assets = paths.n_assets;
  const std::size_t width = params.hidden_width;
  const long double horizon = spec.horizon_years;
  const long double dt = horizon / static_cast<long double>(n_periods);
  const long double norm = spec.injection > 0.0
                               ? static_cast<long double>(spec.injection) * n_periods
                               : 1.0L;
  const long double mult = std::exp(static_cast<long double>(spec.effective_spread()) * horizon);
  const long double eps = spec.epsilon;

  long double total = 0.0L;
  std::vector<long double> hidden(width), logits(n_assets), weights(n_assets);
  for (std::size_t l = 0; l < paths.n_paths; ++l) {
    long double wealth = 0.0L;
    long double bench = 0.0L;
    for (std::size_t n = 0; n < n_periods; ++n) {
      const long double feats[3] = {(horizon - n * dt) / horizon, wealth / norm, bench / norm};
      for (std::size_t j = 0; j < width; ++j) {
        long double u = 0.0L;
        for (std::size_t i = 0; i < 3; ++i) u += feats[i] * params.input_weights[i * width + j];
        hidden[j] = 1.0L / (1.0L + std::exp(u));
      }
      long double max_logit = -std::numeric_limits<long double>::infinity();
      for (std::size_t m = 0; m < n_assets; ++m) {
        logits[m] = 0.0L;
        for (std::size_t k = 0; k < width; ++k) {
          logits[m] += params.output_weights[k * n_assets + m] * hidden[k];
        }
        if (logits[m] > max_logit) max_logit = logits[m];
      }
      long double z = 0.0L;
      for (std::size_t m = 0; m < n_assets; ++m) {
        weights[m] = std::exp(logits[m] - max_logit);
        z += weights[m];
      }
      long double growth = 0.0L;
      long double bench_growth = 0.0L;
      for (std::size_t m = 0; m < n_assets; ++m) {
        growth += weights[m] / z * static_cast<long double>(paths.ret(l, n, m));
        bench_growth += static_cast<long double>(spec.benchmark_weights[m]) *
                        static_cast<long double>(paths.ret(l, n, m));
      }
      wealth = growth * (wealth + static_cast<long double>(spec.injection));
      bench = bench_growth * (bench + static_cast<long double>(spec.injection));
    }
    const long double diff = wealth - mult * bench;
    if (spec.mode == outperf::objective::Mode::asymmetric) {
      if (diff > eps) {
        total += diff;
      } else if (diff < -eps) {
        total += (diff + eps) * (diff + eps);
      } else {
        total += diff * diff / (4.0L * eps) + 0.5L * diff + 0.25L * eps;
      }
    } else {
      const long double below = diff < 0.0L ? diff : 0.0L;
      total += below * below;
    }
  }
  return total / static_cast<long double>(paths.n_paths);
}

/// Central finite difference of objective_value_ld in coordinate j.
inline double fd_gradient_ld(const outperf::policy::Params& params, const outperf::PathSet& paths,
                             const outperf::objective::InvestmentSpec& spec, std::size_t j,
                             double step = 1e-6) {
  auto flat = params.flatten();
  outperf::policy::Params shifted = params;
  auto probe = flat;
  probe[j] = flat[j] + step;
  shifted.assign_flat(probe);
  const long double up = objective_value_ld(shifted, paths, spec);
  probe[j] = flat[j] - step;
  shifted.assign_flat(probe);
  const long double down = objective_value_ld(shifted, paths, spec);
  return static_cast<double>((up - down) / (2.0L * static_cast<long double>(step)));
}

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;  // of the mean
};

inline Moments sample_moments(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace testutil
