#include "outperf/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace outperf::evaluate {

double quantile(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw parameter_error("quantile: empty sample");
  if (!(level > 0.0 && level < 1.0)) throw parameter_error("quantile: level must be in (0, 1)");
  const std::size_t n = sorted.size();
  const double h = level * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::ceil(h));
  if (h == std::floor(h) && k < n) {
    return 0.5 * (sorted[k - 1] + sorted[k]);  // midpoint between order statistics
  }
  return sorted[std::min(std::max<std::size_t>(k, 1), n) - 1];
}

namespace {

double strict_below_fraction(const std::vector<double>& samples, double threshold) {
  std::size_t count = 0;
  for (double v : samples) count += v < threshold;
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

}  // namespace

WealthStats terminal_stats(const objective::Trajectories& trajectories, Strategy which,
                           const std::vector<double>& var_levels,
                           const std::vector<double>& below_thresholds) {
  const std::vector<double> samples = trajectories.terminal(which == Strategy::adaptive);
  if (samples.size() < 2) throw parameter_error("terminal_stats: need at least 2 samples");

  WealthStats stats;
  double sum = 0.0;
  for (double v : samples) sum += v;
  stats.mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(ss / static_cast<double>(samples.size() - 1));

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  stats.median = quantile(sorted, 0.5);
  for (double level : var_levels) {
    if (!(level > 0.0 && level < 1.0)) throw parameter_error("terminal_stats: VaR level must be in (0, 1)");
    stats.var_at_level[level] = quantile(sorted, 1.0 - level);
  }
  for (double threshold : below_thresholds) {
    stats.prob_below[threshold] = strict_below_fraction(samples, threshold);
  }
  return stats;
}

CrossProbabilities cross_prob(const std::vector<double>& adaptive_terminal,
                              const std::vector<double>& benchmark_terminal) {
  if (adaptive_terminal.size() != benchmark_terminal.size() || adaptive_terminal.empty()) {
    throw alignment_error("cross_prob: sample sets must be pathwise aligned");
  }
  std::vector<double> sorted_adaptive = adaptive_terminal;
  std::vector<double> sorted_benchmark = benchmark_terminal;
  std::sort(sorted_adaptive.begin(), sorted_adaptive.end());
  std::sort(sorted_benchmark.begin(), sorted_benchmark.end());
  const double median_adaptive = quantile(sorted_adaptive, 0.5);
  const double median_benchmark = quantile(sorted_benchmark, 0.5);

  CrossProbabilities cross;
  cross.adaptive_below_benchmark_median = strict_below_fraction(adaptive_terminal, median_benchmark);
  cross.benchmark_below_adaptive_median = strict_below_fraction(benchmark_terminal, median_adaptive);
  std::size_t below = 0;
  for (std::size_t l = 0; l < adaptive_terminal.size(); ++l) {
    below += adaptive_terminal[l] < benchmark_terminal[l];
  }
  cross.adaptive_below_pathwise = static_cast<double>(below) / static_cast<double>(adaptive_terminal.size());
  return cross;
}

std::vector<std::pair<double, double>> cdf_points(std::vector<double> samples) {
  if (samples.empty()) throw parameter_error("cdf_points: empty sample");
  std::sort(samples.begin(), samples.end());
  std::vector<std::pair<double, double>> points(samples.size());
  const double n = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    points[k] = {samples[k], static_cast<double>(k + 1) / n};
  }
  return points;
}

PercentileFan percentile_fan(const objective::Trajectories& trajectories, FanStatistic statistic,
                             double horizon_years, const std::vector<double>& levels) {
  if (trajectories.n_paths == 0) throw parameter_error("percentile_fan: empty trajectories");
  for (double level : levels) {
    if (!(level > 0.0 && level < 100.0)) throw parameter_error("percentile_fan: levels must be in (0, 100)");
  }
  const std::size_t n_times = statistic == FanStatistic::stock_allocation
                                  ? trajectories.n_periods
                                  : trajectories.n_periods + 1;
  const double dt = horizon_years / static_cast<double>(trajectories.n_periods);

  PercentileFan fan;
  fan.levels = levels;
  fan.times.resize(n_times);
  fan.mean.resize(n_times);
  fan.values = Matrix(n_times, levels.size());

  std::vector<double> column(trajectories.n_paths);
  for (std::size_t t = 0; t < n_times; ++t) {
    fan.times[t] = static_cast<double>(t) * dt;
    for (std::size_t l = 0; l < trajectories.n_paths; ++l) {
      switch (statistic) {
        case FanStatistic::wealth_diff:
          column[l] = trajectories.adaptive.at(l, t) - trajectories.benchmark.at(l, t);
          break;
        case FanStatistic::relative_wealth_diff: {
          const double bench = trajectories.benchmark.at(l, t);
          if (!(bench > 0.0)) {
            throw parameter_error("percentile_fan: relative difference needs positive benchmark wealth");
          }
          column[l] = (trajectories.adaptive.at(l, t) - bench) / bench;
          break;
        }
        case FanStatistic::stock_allocation:
          column[l] = trajectories.allocation(l, t, 0);
          break;
      }
    }
    double sum = 0.0;
    for (double v : column) sum += v;
    fan.mean[t] = sum / static_cast<double>(column.size());
    std::sort(column.begin(), column.end());
    for (std::size_t q = 0; q < levels.size(); ++q) {
      fan.values.at(t, q) = quantile(column, levels[q] / 100.0);
    }
  }
  return fan;
}

HeatmapGrid allocation_heatmap(const objective::Trajectories& trajectories, double horizon_years,
                               std::size_t time_bins, std::size_t diff_bins) {
  if (time_bins == 0 || diff_bins == 0) throw parameter_error("allocation_heatmap: bins must be >= 1");
  if (trajectories.n_paths == 0) throw parameter_error("allocation_heatmap: empty trajectories");
  const std::size_t n_periods = trajectories.n_periods;
  const double dt = horizon_years / static_cast<double>(n_periods);

  // Observations live at decision times t_0 .. t_{N-1}.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t l = 0; l < trajectories.n_paths; ++l) {
    for (std::size_t n = 0; n < n_periods; ++n) {
      const double diff = trajectories.adaptive.at(l, n) - trajectories.benchmark.at(l, n);
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
  }
  if (lo == hi) hi = lo + 1.0;  // single-valued data still needs a bin width

  HeatmapGrid grid;
  grid.time_edges.resize(time_bins + 1);
  for (std::size_t b = 0; b <= time_bins; ++b) {
    grid.time_edges[b] = static_cast<double>(b) * (static_cast<double>(n_periods) * dt) /
                         static_cast<double>(time_bins);
  }
  grid.diff_edges.resize(diff_bins + 1);
  for (std::size_t b = 0; b <= diff_bins; ++b) {
    grid.diff_edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(diff_bins);
  }
  grid.mean_allocation = Matrix(time_bins, diff_bins, std::numeric_limits<double>::quiet_NaN());
  grid.counts.assign(time_bins * diff_bins, 0);

  Matrix sums(time_bins, diff_bins, 0.0);
  for (std::size_t l = 0; l < trajectories.n_paths; ++l) {
    for (std::size_t n = 0; n < n_periods; ++n) {
      const double t = static_cast<double>(n) * dt;
      const double diff = trajectories.adaptive.at(l, n) - trajectories.benchmark.at(l, n);
      std::size_t tb = static_cast<std::size_t>(
          (t - grid.time_edges.front()) / (grid.time_edges.back() - grid.time_edges.front()) *
          static_cast<double>(time_bins));
      std::size_t db = static_cast<std::size_t>((diff - lo) / (hi - lo) * static_cast<double>(diff_bins));
      tb = std::min(tb, time_bins - 1);
      db = std::min(db, diff_bins - 1);
      sums.at(tb, db) += trajectories.allocation(l, n, 0);
      ++grid.counts[tb * diff_bins + db];
    }
  }
  for (std::size_t tb = 0; tb < time_bins; ++tb) {
    for (std::size_t db = 0; db < diff_bins; ++db) {
      const std::size_t count = grid.counts[tb * diff_bins + db];
      if (count > 0) grid.mean_allocation.at(tb, db) = sums.at(tb, db) / static_cast<double>(count);
    }
  }
  return grid;
}

std::vector<BacktestRecord> backtest_single_path(const policy::Params& params,
                                                 const ReturnPath& historical,
                                                 const objective::InvestmentSpec& spec) {
  spec.validate();
  params.validate();
  if (historical.returns.rows != spec.n_periods) {
    throw shape_error("backtest: path has " + std::to_string(historical.returns.rows) +
                      " periods, spec expects " + std::to_string(spec.n_periods));
  }
  if (historical.returns.cols != params.n_assets ||
      historical.returns.cols != spec.benchmark_weights.size()) {
    throw shape_error("backtest: asset count mismatch");
  }
  for (double v : historical.returns.data) {
    if (!(v > 0.0)) throw parameter_error("backtest: gross returns must be positive");
  }

  const double dt = spec.horizon_years / static_cast<double>(spec.n_periods);
  const policy::FeatureScaling scaling = spec.scaling();
  std::vector<BacktestRecord> records;
  records.reserve(spec.n_periods + 1);

  double wealth = 0.0;
  double bench = 0.0;
  std::vector<double> alloc(params.n_assets);
  for (std::size_t n = 0; n < spec.n_periods; ++n) {
    const double t = static_cast<double>(n) * dt;
    const auto feats = policy::features(t, wealth, bench, scaling);
    policy::allocate(feats, params, alloc);
    const auto r = historical.returns.row(n);
    double growth = 0.0;
    double bench_growth = 0.0;
    for (std::size_t m = 0; m < params.n_assets; ++m) {
      growth += alloc[m] * r[m];
      bench_growth += spec.benchmark_weights[m] * r[m];
    }
    records.push_back({t, wealth + spec.injection, bench + spec.injection, alloc});
    wealth = growth * (wealth + spec.injection);
    bench = bench_growth * (bench + spec.injection);
  }
  records.push_back({spec.horizon_years, wealth, bench, {}});
  return records;
}

}  // namespace outperf::evaluate
