#pragma once

#include <cstddef>
#include <vector>

#include "outperf/market_data.hpp"
#include "outperf/matrix.hpp"
#include "outperf/policy.hpp"

namespace outperf::objective {

/// Which terminal-wealth penalty is minimized.
///  - shortfall_vs_benchmark: mean of min(W - W_b, 0)^2 (spread forced to 0);
///    its optimum is exactly the benchmark strategy with value 0.
///  - shortfall_vs_elevated: same quadratic shortfall against the elevated
///    target e^{sT} W_b.
///  - asymmetric: smoothed quadratic-below / linear-above penalty around the
///    elevated target.
enum class Mode { shortfall_vs_benchmark, shortfall_vs_elevated, asymmetric };

struct InvestmentSpec {
  std::size_t n_periods = 30;          // N rebalance periods
  double horizon_years = 30.0;         // T
  double injection = 10.0;             // q, added at each decision time
  std::vector<double> benchmark_weights = {0.5, 0.5};  // constant p-tilde
  double spread = 0.01;                // s, target outperformance per year
  Mode mode = Mode::asymmetric;
  double epsilon = 1.0;                // smoothing width, currency units

  void validate() const;
  double effective_spread() const {
    return mode == Mode::shortfall_vs_benchmark ? 0.0 : spread;
  }
  double elevated_multiplier() const;  // exp(effective_spread * horizon)
  double wealth_norm() const;          // injection * n_periods, or 1 if zero
  policy::FeatureScaling scaling() const {
    return {horizon_years, wealth_norm()};
  }
};

/// Post-injection wealth paths for both strategies plus the allocations the
/// policy actually used. Column n < N holds W(t_n^+); column N holds the
/// terminal wealth W(t_N^-) (no injection at the horizon).
struct Trajectories {
  std::size_t n_paths = 0;
  std::size_t n_periods = 0;
  std::size_t n_assets = 0;
  Matrix adaptive;                  // L x (N+1)
  Matrix benchmark;                 // L x (N+1)
  std::vector<double> allocations;  // L * N * n_assets

  double allocation(std::size_t path, std::size_t period, std::size_t asset) const {
    return allocations[(path * n_periods + period) * n_assets + asset];
  }
  std::vector<double> terminal(bool adaptive_strategy) const;
};

/// Penalty kernel g(x) = min(x,0)^2 + max(x,0).
double g(double x);

/// C1 smoothing of g:
///   x                      for x > eps
///   x^2/(4 eps) + x/2 + eps/4   for |x| <= eps
///   (x + eps)^2            for x < -eps
double g_bar(double x, double eps);

/// Derivative of g_bar; continuous everywhere.
double g_bar_prime(double x, double eps);

/// Runs the wealth recursion W(t_{n+1}^-) = p^T R(t_n) (W(t_n^-) + q) for the
/// policy and, with fixed weights, for the benchmark, along every path.
Trajectories simulate_wealth(const policy::Params& params, const PathSet& paths,
                             const InvestmentSpec& spec);

/// Sample-average objective over the path set in the spec's mode.
double sample_objective(const policy::Params& params, const PathSet& paths,
                        const InvestmentSpec& spec, int workers = 1);

/// Exact reverse-mode gradient of sample_objective with respect to the flat
/// parameter vector. The benchmark trajectory carries no dependence on the
/// parameters, so only the adaptive recursion is differentiated.
std::vector<double> gradient(const policy::Params& params, const PathSet& paths,
                             const InvestmentSpec& spec, int workers = 1);

/// Objective and gradient in one pass.
double value_and_gradient(const policy::Params& params, const PathSet& paths,
                          const InvestmentSpec& spec, std::vector<double>& grad,
                          int workers = 1);

/// Central finite differences of the analytic gradient, symmetrized as
/// (H + H^T)/2.
Matrix fd_hessian(const policy::Params& params, const PathSet& paths, const InvestmentSpec& spec,
                  double step, int workers = 1);

}  // namespace outperf::objective
