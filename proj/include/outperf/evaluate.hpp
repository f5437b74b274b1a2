#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "outperf/objective.hpp"

namespace outperf::evaluate {

/// Terminal-wealth summary. VaR follows the wealth convention: the value at
/// level a is the (1-a) quantile of terminal wealth, so larger is better.
struct WealthStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, denominator L-1
  double median = 0.0;
  std::map<double, double> var_at_level;  // level -> wealth quantile
  std::map<double, double> prob_below;    // threshold -> Pr[W_T < threshold]
};

enum class Strategy { adaptive, benchmark };

/// Empirical quantile of a sorted sample: midpoint of the two straddling
/// order statistics when level * L is an integer, the ceiling order
/// statistic otherwise. No interpolation, so results are reproducible
/// bit-exactly from a given sample.
double quantile(const std::vector<double>& sorted, double level);

WealthStats terminal_stats(const objective::Trajectories& trajectories, Strategy which,
                           const std::vector<double>& var_levels = {0.90},
                           const std::vector<double>& below_thresholds = {});

struct CrossProbabilities {
  double adaptive_below_benchmark_median = 0.0;  // Pr[W^NN < median(W^CP)]
  double benchmark_below_adaptive_median = 0.0;  // Pr[W^CP < median(W^NN)]
  double adaptive_below_pathwise = 0.0;          // Pr[W^NN < W^CP], same path
};

CrossProbabilities cross_prob(const std::vector<double>& adaptive_terminal,
                              const std::vector<double>& benchmark_terminal);

/// Sorted (value, k/L) pairs forming the right-continuous empirical CDF.
std::vector<std::pair<double, double>> cdf_points(std::vector<double> samples);

enum class FanStatistic { wealth_diff, relative_wealth_diff, stock_allocation };

/// Cross-sectional percentiles of a per-time statistic. Wealth statistics
/// span t_0..t_N; the allocation statistic spans the N decision times only.
/// The stock is asset column 0 by convention.
struct PercentileFan {
  std::vector<double> times;   // years
  std::vector<double> levels;  // percentile levels in (0, 100)
  Matrix values;               // times x levels
  std::vector<double> mean;    // per time
};

PercentileFan percentile_fan(const objective::Trajectories& trajectories, FanStatistic statistic,
                             double horizon_years,
                             const std::vector<double>& levels = {5, 20, 50, 80, 95});

/// Mean stock allocation binned over (time, wealth difference W - W_b).
/// Cells that received no observations keep count 0 and a quiet-NaN mean so
/// they are distinguishable from a genuine zero allocation.
struct HeatmapGrid {
  std::vector<double> time_edges;  // time_bins + 1, years
  std::vector<double> diff_edges;  // diff_bins + 1, currency units
  Matrix mean_allocation;          // time_bins x diff_bins
  std::vector<std::size_t> counts;  // row-major, same shape
};

HeatmapGrid allocation_heatmap(const objective::Trajectories& trajectories, double horizon_years,
                               std::size_t time_bins, std::size_t diff_bins);

struct BacktestRecord {
  double time_years = 0.0;
  double wealth = 0.0;            // W(t_n^+); terminal row holds W(t_N^-)
  double benchmark_wealth = 0.0;
  std::vector<double> allocation;  // empty on the terminal row
};

/// Deterministic forward pass of the wealth recursion along one supplied
/// path, e.g. an actual historical period.
std::vector<BacktestRecord> backtest_single_path(const policy::Params& params,
                                                 const ReturnPath& historical,
                                                 const objective::InvestmentSpec& spec);

}  // namespace outperf::evaluate
