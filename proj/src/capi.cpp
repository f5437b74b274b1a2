#include "outperf.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "outperf/bootstrap.hpp"
#include "outperf/evaluate.hpp"
#include "outperf/io.hpp"
#include "outperf/kou.hpp"
#include "outperf/market_data.hpp"
#include "outperf/objective.hpp"
#include "outperf/policy.hpp"
#include "outperf/trainer.hpp"

// Handle definitions. Each is a thin box around the core type so the C side
// only ever sees incomplete struct pointers.
struct opf_index_series {
  outperf::IndexSeries series;
};
struct opf_panel {
  outperf::AssetPanel panel;
};
struct opf_pathset {
  outperf::PathSet paths;
};
struct opf_policy {
  outperf::policy::Params params;
};
struct opf_trajectories {
  outperf::objective::Trajectories trajectories;
  double horizon_years = 1.0;  // carried along for the time-indexed exports
};
struct opf_train_report {
  outperf::trainer::Report report;
};

namespace {

thread_local std::string g_last_error = "no error";

opf_status fail(opf_status status, const char* what) {
  g_last_error = what;
  return status;
}

opf_status classify(const std::exception& e) {
  using namespace outperf;
  g_last_error = e.what();
  if (dynamic_cast<const parse_error*>(&e)) return OPF_ERROR_PARSE;
  if (dynamic_cast<const alignment_error*>(&e)) return OPF_ERROR_ALIGNMENT;
  if (dynamic_cast<const shape_error*>(&e)) return OPF_ERROR_SHAPE;
  if (dynamic_cast<const parameter_error*>(&e)) return OPF_ERROR_INVALID_ARGUMENT;
  if (dynamic_cast<const io_error*>(&e)) return OPF_ERROR_IO;
  if (dynamic_cast<const numeric_error*>(&e)) return OPF_ERROR_NUMERIC;
  return OPF_ERROR_INTERNAL;
}

template <typename Fn>
opf_status guarded(Fn&& fn) {
  try {
    fn();
    return OPF_OK;
  } catch (const std::exception& e) {
    return classify(e);
  } catch (...) {
    return fail(OPF_ERROR_INTERNAL, "unknown failure");
  }
}

outperf::bootstrap::Config to_config(const opf_bootstrap_config& c) {
  outperf::bootstrap::Config config;
  config.mode = c.stationary ? outperf::bootstrap::Mode::stationary
                             : outperf::bootstrap::Mode::fixed;
  config.expected_blocksize = c.expected_blocksize;
  config.path_length = static_cast<std::size_t>(c.path_length);
  return config;
}

outperf::kou::Params to_params(const opf_kou_params& p) {
  outperf::kou::Params params;
  params.mu = p.mu;
  params.sigma = p.sigma;
  params.lambda_jump = p.lambda;
  params.p_up = p.p_up;
  params.eta1 = p.eta1;
  params.eta2 = p.eta2;
  params.r = p.r;
  return params;
}

outperf::objective::InvestmentSpec to_spec(const opf_investment_spec& s) {
  outperf::objective::InvestmentSpec spec;
  spec.n_periods = static_cast<std::size_t>(s.n_periods);
  spec.horizon_years = s.horizon_years;
  spec.injection = s.injection;
  if (s.benchmark_weights == nullptr) throw outperf::parameter_error("benchmark weights are null");
  spec.benchmark_weights.assign(s.benchmark_weights, s.benchmark_weights + s.n_assets);
  spec.spread = s.spread;
  switch (s.mode) {
    case OPF_MODE_SHORTFALL:
      spec.mode = outperf::objective::Mode::shortfall_vs_benchmark;
      break;
    case OPF_MODE_SHORTFALL_ELEVATED:
      spec.mode = outperf::objective::Mode::shortfall_vs_elevated;
      break;
    case OPF_MODE_ASYMMETRIC:
      spec.mode = outperf::objective::Mode::asymmetric;
      break;
    default:
      throw outperf::parameter_error("unknown objective mode");
  }
  spec.epsilon = s.epsilon;
  return spec;
}

}  // namespace

extern "C" {

const char* opf_last_error(void) { return g_last_error.c_str(); }

const char* opf_version(void) { return "0.1.0"; }

/* ------------------------------ market data --------------------------- */

opf_status opf_index_load_csv(const char* path, opf_index_series** out) {
  if (!path || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new opf_index_series{outperf::load_index_csv(path)}; });
}

opf_status opf_index_deflate(const opf_index_series* nominal, const opf_index_series* cpi,
                             opf_index_series** out) {
  if (!nominal || !cpi || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new opf_index_series{outperf::deflate(nominal->series, cpi->series)}; });
}

void opf_index_free(opf_index_series* series) { delete series; }

opf_status opf_panel_from_indexes(const opf_index_series* const* series, size_t count,
                                  opf_panel** out) {
  if (!series || !out || count == 0) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::vector<double>> returns;
    std::vector<std::string> names;
    for (size_t i = 0; i < count; ++i) {
      if (!series[i]) throw outperf::parameter_error("null index series");
      if (!(series[i]->series.dates == series[0]->series.dates)) {
        throw outperf::alignment_error("index series '" + series[i]->series.name +
                                       "' has a different date axis than '" +
                                       series[0]->series.name + "'");
      }
      returns.push_back(outperf::to_returns(series[i]->series));
      names.push_back(series[i]->series.name);
    }
    // Returns are stamped with the month they end on.
    std::vector<outperf::YearMonth> dates(series[0]->series.dates.begin() + 1,
                                          series[0]->series.dates.end());
    *out = new opf_panel{outperf::build_panel(returns, names, dates)};
  });
}

opf_status opf_panel_load_csv(const char* path, opf_panel** out) {
  if (!path || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new opf_panel{outperf::load_panel_csv(path)}; });
}

opf_status opf_panel_save_csv(const opf_panel* panel, const char* path) {
  if (!panel || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { outperf::save_panel_csv(panel->panel, path); });
}

opf_status opf_panel_shape(const opf_panel* panel, uint64_t* months, uint64_t* assets) {
  if (!panel) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  if (months) *months = panel->panel.returns.rows;
  if (assets) *assets = panel->panel.returns.cols;
  return OPF_OK;
}

void opf_panel_free(opf_panel* panel) { delete panel; }

/* ---------------------------- path generation ------------------------- */

opf_status opf_bootstrap_resample(const opf_panel* panel, const opf_bootstrap_config* config,
                                  uint64_t n_paths, uint64_t seed, int workers,
                                  opf_pathset** out) {
  if (!panel || !config || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new opf_pathset{outperf::bootstrap::resample_set(
        panel->panel, to_config(*config), static_cast<std::size_t>(n_paths), seed, workers)};
  });
}

opf_status opf_pathset_compound(const opf_pathset* monthly, uint64_t months_per_period,
                                opf_pathset** out) {
  if (!monthly || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new opf_pathset{
        outperf::compound_paths(monthly->paths, static_cast<std::size_t>(months_per_period))};
  });
}

opf_status opf_prob_identical_fixed(uint64_t n, uint64_t n_tot, uint64_t b1, uint64_t b2,
                                    double* log_prob) {
  if (!log_prob) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *log_prob = outperf::bootstrap::prob_identical_fixed(n, n_tot, b1, b2).log_value;
  });
}

opf_status opf_prob_identical_stationary(uint64_t n, uint64_t n_tot, double b1, double b2,
                                         double* log_prob) {
  if (!log_prob) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *log_prob = outperf::bootstrap::prob_identical_stationary(n, n_tot, b1, b2).log_value;
  });
}

opf_status opf_mc_prob_identical(const opf_bootstrap_config* config1,
                                 const opf_bootstrap_config* config2, uint64_t n_tot,
                                 uint64_t trials, uint64_t seed, double* estimate,
                                 double* std_error) {
  if (!config1 || !config2 || !estimate || !std_error) {
    return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    outperf::Rng rng(seed);
    const auto mc = outperf::bootstrap::mc_prob_identical(
        to_config(*config1), to_config(*config2), static_cast<std::size_t>(n_tot), trials, rng);
    *estimate = mc.estimate;
    *std_error = mc.std_error;
  });
}

opf_status opf_kou_default_params(opf_kou_params* out) {
  if (!out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  const auto p = outperf::kou::default_params();
  *out = {p.mu, p.sigma, p.lambda_jump, p.p_up, p.eta1, p.eta2, p.r};
  return OPF_OK;
}

opf_status opf_kou_load_params(const char* path, opf_kou_params* out) {
  if (!path || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto p = outperf::kou::load_params_file(path);
    *out = {p.mu, p.sigma, p.lambda_jump, p.p_up, p.eta1, p.eta2, p.r};
  });
}

opf_status opf_kou_simulate(const opf_kou_params* params, uint64_t n_periods, double dt_years,
                            uint64_t n_paths, uint64_t seed, int workers, opf_pathset** out) {
  if (!params || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new opf_pathset{outperf::kou::simulate_panel(
        to_params(*params), static_cast<std::size_t>(n_periods), dt_years,
        static_cast<std::size_t>(n_paths), seed, workers)};
  });
}

opf_status opf_pathset_save(const opf_pathset* paths, const char* path) {
  if (!paths || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { outperf::io::save_pathset(paths->paths, path); });
}

opf_status opf_pathset_load(const char* path, opf_pathset** out) {
  if (!path || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new opf_pathset{outperf::io::load_pathset(path)}; });
}

opf_status opf_pathset_shape(const opf_pathset* paths, uint64_t* n_paths, uint64_t* n_periods,
                             uint64_t* n_assets) {
  if (!paths) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  if (n_paths) *n_paths = paths->paths.n_paths;
  if (n_periods) *n_periods = paths->paths.n_periods;
  if (n_assets) *n_assets = paths->paths.n_assets;
  return OPF_OK;
}

void opf_pathset_free(opf_pathset* paths) { delete paths; }

/* --------------------------- objective / training --------------------- */

opf_status opf_train_config_default(opf_train_config* out) {
  if (!out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  const outperf::trainer::Config c;
  *out = {c.max_iterations, c.grad_tolerance, c.initial_trust_radius, c.max_trust_radius,
          c.restarts,       c.seed,           c.init_scale,           c.hidden_width,
          c.workers};
  return OPF_OK;
}

opf_status opf_train(const opf_pathset* paths, const opf_investment_spec* spec,
                     const opf_train_config* config, opf_policy** policy_out,
                     opf_train_report** report_out) {
  if (!paths || !spec || !config || !policy_out) {
    return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    outperf::trainer::Config c;
    c.max_iterations = static_cast<std::size_t>(config->max_iterations);
    c.grad_tolerance = config->grad_tolerance;
    c.initial_trust_radius = config->initial_trust_radius;
    c.max_trust_radius = config->max_trust_radius;
    c.restarts = static_cast<std::size_t>(config->restarts);
    c.seed = config->seed;
    c.init_scale = config->init_scale;
    c.hidden_width = static_cast<std::size_t>(config->hidden_width);
    c.workers = config->workers;
    auto report = outperf::trainer::train(paths->paths, to_spec(*spec), c);
    *policy_out = new opf_policy{report.best_params};
    if (report_out) *report_out = new opf_train_report{std::move(report)};
  });
}

opf_status opf_train_report_best_objective(const opf_train_report* report, double* out) {
  if (!report || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  *out = report->report.best_objective;
  return OPF_OK;
}

opf_status opf_train_report_save(const opf_train_report* report, const char* path) {
  if (!report || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { outperf::trainer::save_report_json(report->report, path); });
}

void opf_train_report_free(opf_train_report* report) { delete report; }

opf_status opf_policy_save(const opf_policy* policy, const char* path) {
  if (!policy || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { outperf::policy::save_params(policy->params, path); });
}

opf_status opf_policy_load(const char* path, opf_policy** out) {
  if (!path || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new opf_policy{outperf::policy::load_params(path)}; });
}

opf_status opf_policy_allocate(const opf_policy* policy, const double* features3,
                               double* weights_out, uint64_t n_assets) {
  if (!policy || !features3 || !weights_out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (n_assets != policy->params.n_assets) {
      throw outperf::shape_error("opf_policy_allocate: wrong asset count");
    }
    outperf::policy::allocate({features3, outperf::policy::kNumFeatures}, policy->params,
                              {weights_out, static_cast<std::size_t>(n_assets)});
  });
}

void opf_policy_free(opf_policy* policy) { delete policy; }

opf_status opf_sample_objective(const opf_policy* policy, const opf_pathset* paths,
                                const opf_investment_spec* spec, double* out) {
  if (!policy || !paths || !spec || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = outperf::objective::sample_objective(policy->params, paths->paths, to_spec(*spec));
  });
}

/* ------------------------------- evaluation --------------------------- */

opf_status opf_simulate_wealth(const opf_policy* policy, const opf_pathset* paths,
                               const opf_investment_spec* spec, opf_trajectories** out) {
  if (!policy || !paths || !spec || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto cpp_spec = to_spec(*spec);
    auto trajectories = outperf::objective::simulate_wealth(policy->params, paths->paths, cpp_spec);
    auto* handle = new opf_trajectories{std::move(trajectories)};
    handle->horizon_years = cpp_spec.horizon_years;
    *out = handle;
  });
}

void opf_trajectories_free(opf_trajectories* trajectories) { delete trajectories; }

opf_status opf_eval_terminal_stats(const opf_trajectories* trajectories, int strategy,
                                   double var_level, double below_threshold,
                                   opf_wealth_stats* out) {
  if (!trajectories || !out) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto which = strategy == OPF_STRATEGY_BENCHMARK
                           ? outperf::evaluate::Strategy::benchmark
                           : outperf::evaluate::Strategy::adaptive;
    const auto stats = outperf::evaluate::terminal_stats(trajectories->trajectories, which,
                                                         {var_level}, {below_threshold});
    out->mean = stats.mean;
    out->stddev = stats.stddev;
    out->median = stats.median;
    out->var = stats.var_at_level.at(var_level);
    out->prob_below = stats.prob_below.at(below_threshold);
  });
}

opf_status opf_eval_cross_prob(const opf_trajectories* trajectories,
                               double* adaptive_below_benchmark_median,
                               double* benchmark_below_adaptive_median,
                               double* adaptive_below_pathwise) {
  if (!trajectories) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto cross = outperf::evaluate::cross_prob(trajectories->trajectories.terminal(true),
                                                     trajectories->trajectories.terminal(false));
    if (adaptive_below_benchmark_median) {
      *adaptive_below_benchmark_median = cross.adaptive_below_benchmark_median;
    }
    if (benchmark_below_adaptive_median) {
      *benchmark_below_adaptive_median = cross.benchmark_below_adaptive_median;
    }
    if (adaptive_below_pathwise) *adaptive_below_pathwise = cross.adaptive_below_pathwise;
  });
}

opf_status opf_eval_write_cdf_csv(const opf_trajectories* trajectories, int what,
                                  const char* path) {
  if (!trajectories || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& t = trajectories->trajectories;
    std::vector<double> samples;
    if (what == OPF_CDF_ADAPTIVE) {
      samples = t.terminal(true);
    } else if (what == OPF_CDF_BENCHMARK) {
      samples = t.terminal(false);
    } else if (what == OPF_CDF_WEALTH_DIFF) {
      const auto a = t.terminal(true);
      const auto b = t.terminal(false);
      samples.resize(a.size());
      for (std::size_t l = 0; l < a.size(); ++l) samples[l] = a[l] - b[l];
    } else {
      throw outperf::parameter_error("unknown CDF selector");
    }
    outperf::io::write_cdf_csv(outperf::evaluate::cdf_points(std::move(samples)), path);
  });
}

opf_status opf_eval_write_fan_csv(const opf_trajectories* trajectories, int statistic,
                                  const char* path) {
  if (!trajectories || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    outperf::evaluate::FanStatistic stat;
    switch (statistic) {
      case OPF_FAN_WEALTH_DIFF:
        stat = outperf::evaluate::FanStatistic::wealth_diff;
        break;
      case OPF_FAN_RELATIVE_WEALTH_DIFF:
        stat = outperf::evaluate::FanStatistic::relative_wealth_diff;
        break;
      case OPF_FAN_STOCK_ALLOCATION:
        stat = outperf::evaluate::FanStatistic::stock_allocation;
        break;
      default:
        throw outperf::parameter_error("unknown fan statistic");
    }
    const auto fan = outperf::evaluate::percentile_fan(trajectories->trajectories, stat,
                                                       trajectories->horizon_years);
    outperf::io::write_fan_csv(fan, path);
  });
}

opf_status opf_eval_write_heatmap_csv(const opf_trajectories* trajectories, uint64_t time_bins,
                                      uint64_t diff_bins, const char* path) {
  if (!trajectories || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto grid = outperf::evaluate::allocation_heatmap(
        trajectories->trajectories, trajectories->horizon_years,
        static_cast<std::size_t>(time_bins), static_cast<std::size_t>(diff_bins));
    outperf::io::write_heatmap_csv(grid, path);
  });
}

opf_status opf_eval_write_summary_json(const opf_trajectories* trajectories, double var_level,
                                       const char* path) {
  if (!trajectories || !path) return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    using namespace outperf::evaluate;
    const auto& t = trajectories->trajectories;
    const auto adaptive_terminal = t.terminal(true);
    const auto benchmark_terminal = t.terminal(false);
    auto sorted_a = adaptive_terminal;
    auto sorted_b = benchmark_terminal;
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    const double median_a = quantile(sorted_a, 0.5);
    const double median_b = quantile(sorted_b, 0.5);
    const auto adaptive = terminal_stats(t, Strategy::adaptive, {var_level}, {median_b, median_a});
    const auto benchmark = terminal_stats(t, Strategy::benchmark, {var_level}, {median_b, median_a});
    const auto cross = cross_prob(adaptive_terminal, benchmark_terminal);
    outperf::io::write_summary_json(adaptive, benchmark, cross, t.n_paths, path);
  });
}

opf_status opf_backtest_csv(const opf_policy* policy, const char* returns_csv,
                            uint64_t months_per_period, const opf_investment_spec* spec,
                            const char* out_csv) {
  if (!policy || !returns_csv || !spec || !out_csv) {
    return fail(OPF_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    std::vector<std::string> names;
    outperf::ReturnPath path = outperf::load_return_path_csv(returns_csv, &names);
    if (months_per_period > 1) {
      path = outperf::compound_to_periods(path.returns,
                                          static_cast<std::size_t>(months_per_period));
    }
    // n_periods 0 means "as long as the supplied path".
    opf_investment_spec filled = *spec;
    if (filled.n_periods == 0) filled.n_periods = path.returns.rows;
    if (filled.horizon_years == 0.0) filled.horizon_years = static_cast<double>(filled.n_periods);
    const auto records =
        outperf::evaluate::backtest_single_path(policy->params, path, to_spec(filled));
    outperf::io::write_backtest_csv(records, names, out_csv);
  });
}

} /* extern "C" */
