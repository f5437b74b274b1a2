// Command-line front end. Everything goes through the public C API in
// outperf.h; the C++ core is not touched directly.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "outperf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;    // bad input files, config or arguments
constexpr int kExitNumeric = 3;  // numerical failure

int exit_code_for(opf_status status) {
  switch (status) {
    case OPF_OK:
      return kExitOk;
    case OPF_ERROR_NUMERIC:
    case OPF_ERROR_INTERNAL:
      return kExitNumeric;
    default:
      return kExitInput;
  }
}

// Throws a tagged error so main() can translate to an exit code.
struct CliFailure {
  int code;
  std::string message;
};

void check(opf_status status, const char* context) {
  if (status != OPF_OK) {
    throw CliFailure{exit_code_for(status), std::string(context) + ": " + opf_last_error()};
  }
}

template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, decltype([](T* p) { Free(p); })>;

using IndexHandle = Handle<opf_index_series, opf_index_free>;
using PanelHandle = Handle<opf_panel, opf_panel_free>;
using PathsHandle = Handle<opf_pathset, opf_pathset_free>;
using PolicyHandle = Handle<opf_policy, opf_policy_free>;
using TrajHandle = Handle<opf_trajectories, opf_trajectories_free>;
using ReportHandle = Handle<opf_train_report, opf_train_report_free>;

struct SpecOptions {
  std::uint64_t periods = 0;  // 0: take from the path set
  double horizon = 0.0;       // 0: one year per period
  double injection = 10.0;
  std::vector<double> benchmark = {0.5, 0.5};
  double spread = 0.01;
  std::string objective = "asymmetric";
  double epsilon = 1.0;

  void add_flags(CLI::App* cmd, bool with_objective) {
    cmd->add_option("--periods", periods, "Rebalance periods N (default: from the path set)");
    cmd->add_option("--horizon", horizon, "Horizon T in years (default: one year per period)");
    cmd->add_option("-q,--injection", injection, "Cash injection per rebalance time")->capture_default_str();
    cmd->add_option("--benchmark", benchmark,
                    "Constant benchmark weights, e.g. --benchmark 0.5 0.5")
        ->expected(-1);
    cmd->add_option("--spread", spread, "Target outperformance spread s per year")->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "Smoothing width of the asymmetric penalty")->capture_default_str();
    if (with_objective) {
      cmd->add_option("--objective", objective,
                      "Objective: asymmetric | shortfall | shortfall-elevated")->capture_default_str()
          ->check(CLI::IsMember({"asymmetric", "shortfall", "shortfall-elevated"}));
    }
  }

  opf_investment_spec build(std::uint64_t periods_from_paths) const {
    opf_investment_spec spec{};
    spec.n_periods = periods != 0 ? periods : periods_from_paths;
    spec.horizon_years = horizon != 0.0 ? horizon : static_cast<double>(spec.n_periods);
    spec.injection = injection;
    spec.benchmark_weights = benchmark.data();
    spec.n_assets = benchmark.size();
    spec.spread = spread;
    spec.epsilon = epsilon;
    if (objective == "shortfall") {
      spec.mode = OPF_MODE_SHORTFALL;
    } else if (objective == "shortfall-elevated") {
      spec.mode = OPF_MODE_SHORTFALL_ELEVATED;
    } else {
      spec.mode = OPF_MODE_ASYMMETRIC;
    }
    return spec;
  }
};

PathsHandle load_paths(const std::string& file) {
  opf_pathset* raw = nullptr;
  check(opf_pathset_load(file.c_str(), &raw), "loading path set");
  return PathsHandle(raw);
}

PolicyHandle load_policy(const std::string& file) {
  opf_policy* raw = nullptr;
  check(opf_policy_load(file.c_str(), &raw), "loading policy");
  return PolicyHandle(raw);
}

int run_ingest(const std::vector<std::string>& index_files, const std::string& cpi_file,
               const std::string& out_file) {
  IndexHandle cpi;
  {
    opf_index_series* raw = nullptr;
    check(opf_index_load_csv(cpi_file.c_str(), &raw), "loading CPI index");
    cpi.reset(raw);
  }
  std::vector<IndexHandle> real;
  std::vector<const opf_index_series*> pointers;
  for (const auto& file : index_files) {
    opf_index_series* nominal = nullptr;
    check(opf_index_load_csv(file.c_str(), &nominal), "loading index");
    IndexHandle nominal_handle(nominal);
    opf_index_series* deflated = nullptr;
    check(opf_index_deflate(nominal, cpi.get(), &deflated), "deflating index");
    real.emplace_back(deflated);
    pointers.push_back(deflated);
  }
  opf_panel* panel = nullptr;
  check(opf_panel_from_indexes(pointers.data(), pointers.size(), &panel), "building panel");
  PanelHandle panel_handle(panel);
  check(opf_panel_save_csv(panel, out_file.c_str()), "writing panel");
  std::uint64_t months = 0, assets = 0;
  opf_panel_shape(panel, &months, &assets);
  std::printf("wrote %s: %llu months x %llu assets of real gross returns\n", out_file.c_str(),
              static_cast<unsigned long long>(months), static_cast<unsigned long long>(assets));
  return kExitOk;
}

int run_bootstrap(const std::string& panel_file, const std::string& mode, double blocksize,
                  std::uint64_t periods, std::uint64_t months_per_period, std::uint64_t n_paths,
                  std::uint64_t seed, int workers, const std::string& out_file) {
  opf_panel* panel = nullptr;
  check(opf_panel_load_csv(panel_file.c_str(), &panel), "loading panel");
  PanelHandle panel_handle(panel);

  opf_bootstrap_config config{};
  config.stationary = mode == "stationary" ? 1 : 0;
  config.expected_blocksize = blocksize;
  config.path_length = periods * months_per_period;

  opf_pathset* monthly = nullptr;
  check(opf_bootstrap_resample(panel, &config, n_paths, seed, workers, &monthly), "resampling");
  PathsHandle monthly_handle(monthly);

  const opf_pathset* final_paths = monthly;
  PathsHandle compounded;
  if (months_per_period > 1) {
    opf_pathset* raw = nullptr;
    check(opf_pathset_compound(monthly, months_per_period, &raw), "compounding to periods");
    compounded.reset(raw);
    final_paths = raw;
  }
  check(opf_pathset_save(final_paths, out_file.c_str()), "writing path set");
  std::printf("wrote %s: %llu bootstrap paths, %llu periods\n", out_file.c_str(),
              static_cast<unsigned long long>(n_paths),
              static_cast<unsigned long long>(periods));
  return kExitOk;
}

int run_simulate(bool preset_paper, const std::string& params_file, std::uint64_t periods,
                 double dt_years, std::uint64_t n_paths, std::uint64_t seed, int workers,
                 const std::string& out_file) {
  opf_kou_params params{};
  if (!params_file.empty()) {
    check(opf_kou_load_params(params_file.c_str(), &params), "loading model parameters");
  } else {
    opf_kou_default_params(&params);
    (void)preset_paper;  // the default preset and --preset paper coincide
  }
  opf_pathset* paths = nullptr;
  check(opf_kou_simulate(&params, periods, dt_years, n_paths, seed, workers, &paths),
        "simulating");
  PathsHandle handle(paths);
  check(opf_pathset_save(paths, out_file.c_str()), "writing path set");
  std::printf("wrote %s: %llu synthetic paths, %llu periods\n", out_file.c_str(),
              static_cast<unsigned long long>(n_paths),
              static_cast<unsigned long long>(periods));
  return kExitOk;
}

int run_train(const std::string& paths_file, const SpecOptions& spec_options,
              const opf_train_config& config, const std::string& policy_file,
              const std::string& report_file) {
  PathsHandle paths = load_paths(paths_file);
  std::uint64_t n_paths = 0, n_periods = 0, n_assets = 0;
  opf_pathset_shape(paths.get(), &n_paths, &n_periods, &n_assets);
  const opf_investment_spec spec = spec_options.build(n_periods);

  opf_policy* policy = nullptr;
  opf_train_report* report = nullptr;
  check(opf_train(paths.get(), &spec, &config, &policy, &report), "training");
  PolicyHandle policy_handle(policy);
  ReportHandle report_handle(report);

  check(opf_policy_save(policy, policy_file.c_str()), "writing policy");
  if (!report_file.empty()) {
    check(opf_train_report_save(report, report_file.c_str()), "writing report");
  }
  double best = 0.0;
  opf_train_report_best_objective(report, &best);
  std::printf("trained on %llu paths: best objective %.6g -> %s\n",
              static_cast<unsigned long long>(n_paths), best, policy_file.c_str());
  return kExitOk;
}

int run_evaluate(const std::string& paths_file, const std::string& policy_file,
                 const SpecOptions& spec_options, double var_level, std::uint64_t time_bins,
                 std::uint64_t diff_bins, const std::string& outdir) {
  PathsHandle paths = load_paths(paths_file);
  PolicyHandle policy = load_policy(policy_file);
  std::uint64_t n_paths = 0, n_periods = 0, n_assets = 0;
  opf_pathset_shape(paths.get(), &n_paths, &n_periods, &n_assets);
  const opf_investment_spec spec = spec_options.build(n_periods);

  opf_trajectories* raw = nullptr;
  check(opf_simulate_wealth(policy.get(), paths.get(), &spec, &raw), "simulating wealth");
  TrajHandle trajectories(raw);

  const std::string base = outdir.empty() ? "." : outdir;
  auto out = [&base](const char* name) { return base + "/" + name; };
  check(opf_eval_write_summary_json(raw, var_level, out("summary.json").c_str()),
        "writing summary");
  check(opf_eval_write_cdf_csv(raw, OPF_CDF_ADAPTIVE, out("cdf_terminal_adaptive.csv").c_str()),
        "writing CDF");
  check(opf_eval_write_cdf_csv(raw, OPF_CDF_BENCHMARK, out("cdf_terminal_benchmark.csv").c_str()),
        "writing CDF");
  check(opf_eval_write_cdf_csv(raw, OPF_CDF_WEALTH_DIFF, out("cdf_wealth_diff.csv").c_str()),
        "writing CDF");
  check(opf_eval_write_fan_csv(raw, OPF_FAN_WEALTH_DIFF, out("fan_wealth_diff.csv").c_str()),
        "writing fan");
  check(opf_eval_write_fan_csv(raw, OPF_FAN_RELATIVE_WEALTH_DIFF,
                               out("fan_relative_wealth_diff.csv").c_str()),
        "writing fan");
  check(opf_eval_write_fan_csv(raw, OPF_FAN_STOCK_ALLOCATION,
                               out("fan_stock_allocation.csv").c_str()),
        "writing fan");
  const std::uint64_t tb = time_bins != 0 ? time_bins : n_periods;
  check(opf_eval_write_heatmap_csv(raw, tb, diff_bins,
                                   out("heatmap_stock_allocation.csv").c_str()),
        "writing heatmap");

  opf_wealth_stats adaptive{}, benchmark{};
  check(opf_eval_terminal_stats(raw, OPF_STRATEGY_BENCHMARK, var_level, 0.0, &benchmark),
        "computing stats");
  check(opf_eval_terminal_stats(raw, OPF_STRATEGY_ADAPTIVE, var_level, benchmark.median,
                                &adaptive),
        "computing stats");
  double below_cp = 0.0, cp_below = 0.0, pathwise = 0.0;
  check(opf_eval_cross_prob(raw, &below_cp, &cp_below, &pathwise), "computing cross stats");
  std::printf("evaluated %llu paths into %s\n", static_cast<unsigned long long>(n_paths),
              base.c_str());
  std::printf("  adaptive : mean %.4g  std %.4g  median %.4g\n", adaptive.mean, adaptive.stddev,
              adaptive.median);
  std::printf("  benchmark: mean %.4g  std %.4g  median %.4g\n", benchmark.mean, benchmark.stddev,
              benchmark.median);
  std::printf("  Pr[W_adaptive < median benchmark] = %.4f\n", below_cp);
  std::printf("  Pr[W_benchmark < median adaptive] = %.4f\n", cp_below);
  std::printf("  Pr[W_adaptive < W_benchmark] (pathwise) = %.4f\n", pathwise);
  return kExitOk;
}

int run_backtest(const std::string& returns_file, const std::string& policy_file,
                 const SpecOptions& spec_options, std::uint64_t months_per_period,
                 const std::string& out_file) {
  PolicyHandle policy = load_policy(policy_file);
  // n_periods 0 lets the library take the row count of the input CSV.
  const opf_investment_spec spec = spec_options.build(0);
  check(opf_backtest_csv(policy.get(), returns_file.c_str(), months_per_period, &spec,
                         out_file.c_str()),
        "backtesting");
  std::printf("wrote %s\n", out_file.c_str());
  return kExitOk;
}

int run_verify_theorems(std::uint64_t n, std::uint64_t n_tot, const std::string& mode, double b1,
                        double b2, std::uint64_t trials, std::uint64_t seed) {
  const bool stationary = mode == "stationary";
  double log_prob = 0.0;
  if (stationary) {
    check(opf_prob_identical_stationary(n, n_tot, b1, b2, &log_prob), "closed form");
  } else {
    check(opf_prob_identical_fixed(n, n_tot, static_cast<std::uint64_t>(b1),
                                   static_cast<std::uint64_t>(b2), &log_prob),
          "closed form");
  }
  const double log10_prob = log_prob / std::log(10.0);
  std::printf("identical-path probability, %s blocksizes %g and %g, N=%llu, N_tot=%llu\n",
              mode.c_str(), b1, b2, static_cast<unsigned long long>(n),
              static_cast<unsigned long long>(n_tot));
  std::printf("  closed form: ln p = %.12g   log10 p = %.12g   p = %.6g\n", log_prob, log10_prob,
              std::exp(log_prob));

  if (trials == 0) return kExitOk;
  // Brute force is only meaningful when a match is observable at all.
  const double budget = static_cast<double>(n) * static_cast<double>(trials);
  if (n > 64 || budget > 5e8) {
    std::printf("  Monte Carlo skipped: N * trials too large to brute force\n");
    return kExitOk;
  }
  opf_bootstrap_config c1{stationary ? 1 : 0, b1, n};
  opf_bootstrap_config c2{stationary ? 1 : 0, b2, n};
  double estimate = 0.0, std_error = 0.0;
  check(opf_mc_prob_identical(&c1, &c2, n_tot, trials, seed, &estimate, &std_error),
        "Monte Carlo");
  std::printf("  Monte Carlo (%llu trials): estimate = %.6g  std error = %.3g\n",
              static_cast<unsigned long long>(trials), estimate, std_error);
  if (std_error > 0.0) {
    std::printf("  |closed form - estimate| = %.3g standard errors\n",
                std::fabs(std::exp(log_prob) - estimate) / std_error);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"outperf: learn and evaluate allocation policies against a stochastic benchmark"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value config file; flags win");
  app.set_version_flag("--version", opf_version());

  std::uint64_t seed = 1;
  int workers = 1;
  app.add_option("--seed", seed, "Seed for all randomness in this command")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads for per-path work")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Deflate index CSVs and build a return panel")->fallthrough();
  std::vector<std::string> index_files;
  std::string cpi_file, ingest_out;
  ingest->add_option("--index", index_files, "Nominal index CSV (repeatable)")->required();
  ingest->add_option("--cpi", cpi_file, "CPI index CSV")->required();
  ingest->add_option("-o,--output", ingest_out, "Output panel CSV")->required();

  // bootstrap
  auto* boot = app.add_subcommand("bootstrap", "Resample return paths from a panel")->fallthrough();
  std::string boot_panel, boot_mode = "stationary", boot_out;
  double boot_blocksize = 6.0;
  std::uint64_t boot_periods = 30, boot_mpp = 12, boot_paths = 1000;
  boot->add_option("--panel", boot_panel, "Source panel CSV")->required();
  boot->add_option("--mode", boot_mode, "stationary | fixed")->capture_default_str()
      ->check(CLI::IsMember({"stationary", "fixed"}));
  boot->add_option("--blocksize-months", boot_blocksize, "Expected (or fixed) blocksize, months")->capture_default_str();
  boot->add_option("--periods", boot_periods, "Rebalance periods per path")->capture_default_str();
  boot->add_option("--months-per-period", boot_mpp, "Months compounded per period")->capture_default_str();
  boot->add_option("--paths", boot_paths, "Number of paths")->required();
  boot->add_option("-o,--output", boot_out, "Output path-set file")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate synthetic jump-diffusion paths")->fallthrough();
  std::string sim_params, sim_out, sim_preset;
  std::uint64_t sim_periods = 30, sim_paths = 1000;
  double sim_dt = 1.0;
  sim->add_option("--preset", sim_preset, "'paper' selects the calibrated defaults")
      ->check(CLI::IsMember({"paper"}));
  sim->add_option("--params", sim_params, "Model parameter file (key = value)");
  sim->add_option("--periods", sim_periods, "Rebalance periods per path")->capture_default_str();
  sim->add_option("--dt", sim_dt, "Years per period")->capture_default_str();
  sim->add_option("--paths", sim_paths, "Number of paths")->required();
  sim->add_option("-o,--output", sim_out, "Output path-set file")->required();

  // train
  auto* train = app.add_subcommand("train", "Fit the allocation policy on a path set")->fallthrough();
  std::string train_paths, train_policy, train_report;
  SpecOptions train_spec;
  opf_train_config train_config{};
  opf_train_config_default(&train_config);
  train->add_option("--paths", train_paths, "Training path-set file")->required();
  train_spec.add_flags(train, true);
  train->add_option("--restarts", train_config.restarts, "Independent restarts")->capture_default_str();
  train->add_option("--max-iterations", train_config.max_iterations, "Iterations per restart")->capture_default_str();
  train->add_option("--grad-tol", train_config.grad_tolerance, "Gradient-norm stop tolerance")->capture_default_str();
  train->add_option("--hidden", train_config.hidden_width, "Hidden-layer width")->capture_default_str();
  train->add_option("--init-scale", train_config.init_scale, "Initial weight scale")->capture_default_str();
  train->add_option("-o,--policy", train_policy, "Output policy file")->required();
  train->add_option("--report", train_report, "Optional JSON training report");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Compute statistics and plot-ready tables")->fallthrough();
  std::string eval_paths, eval_policy, eval_outdir = ".";
  SpecOptions eval_spec;
  double eval_var_level = 0.90;
  std::uint64_t eval_time_bins = 0, eval_diff_bins = 20;
  eval->add_option("--paths", eval_paths, "Evaluation path-set file")->required();
  eval->add_option("--policy", eval_policy, "Policy file")->required();
  eval_spec.add_flags(eval, false);
  eval->add_option("--var-level", eval_var_level, "VaR level")->capture_default_str();
  eval->add_option("--time-bins", eval_time_bins, "Heatmap time bins (0: one per period)")->capture_default_str();
  eval->add_option("--diff-bins", eval_diff_bins, "Heatmap wealth-difference bins")->capture_default_str();
  eval->add_option("--outdir", eval_outdir, "Output directory")->capture_default_str();

  // backtest
  auto* back = app.add_subcommand("backtest", "Run the policy along one supplied path")->fallthrough();
  std::string back_returns, back_policy, back_out;
  SpecOptions back_spec;
  std::uint64_t back_mpp = 1;
  back->add_option("--returns", back_returns, "Return path CSV (period,<names...>)")->required();
  back->add_option("--policy", back_policy, "Policy file")->required();
  back_spec.add_flags(back, false);
  back->add_option("--months-per-period", back_mpp,
                   "Compound monthly input rows into periods when > 1")->capture_default_str();
  back->add_option("-o,--output", back_out, "Output CSV")->required();

  // verify-theorems
  auto* verify = app.add_subcommand("verify-theorems",
                                    "Identical-path probabilities: closed form vs Monte Carlo")->fallthrough();
  std::uint64_t ver_n = 360, ver_ntot = 1080, ver_trials = 0;
  std::string ver_mode = "stationary";
  double ver_b1 = 6.0, ver_b2 = 24.0;
  verify->add_option("--n", ver_n, "Resampled path length")->capture_default_str();
  verify->add_option("--ntot", ver_ntot, "Source observations")->capture_default_str();
  verify->add_option("--mode", ver_mode, "stationary | fixed")->capture_default_str()
      ->check(CLI::IsMember({"stationary", "fixed"}));
  verify->add_option("--b1", ver_b1, "First blocksize")->capture_default_str();
  verify->add_option("--b2", ver_b2, "Second blocksize")->capture_default_str();
  verify->add_option("--mc-trials", ver_trials, "Monte Carlo trials (0: closed form only)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*ingest) return run_ingest(index_files, cpi_file, ingest_out);
    if (*boot) {
      return run_bootstrap(boot_panel, boot_mode, boot_blocksize, boot_periods, boot_mpp,
                           boot_paths, seed, workers, boot_out);
    }
    if (*sim) {
      if (!sim_preset.empty() && !sim_params.empty()) {
        throw CliFailure{kExitInput, "--preset and --params are mutually exclusive"};
      }
      return run_simulate(!sim_preset.empty(), sim_params, sim_periods, sim_dt, sim_paths, seed,
                          workers, sim_out);
    }
    if (*train) {
      train_config.seed = seed;
      train_config.workers = workers;
      return run_train(train_paths, train_spec, train_config, train_policy, train_report);
    }
    if (*eval) {
      return run_evaluate(eval_paths, eval_policy, eval_spec, eval_var_level, eval_time_bins,
                          eval_diff_bins, eval_outdir);
    }
    if (*back) {
      return run_backtest(back_returns, back_policy, back_spec, back_mpp, back_out);
    }
    if (*verify) {
      return run_verify_theorems(ver_n, ver_ntot, ver_mode, ver_b1, ver_b2, ver_trials, seed);
    }
  } catch (const CliFailure& failure) {
    std::fprintf(stderr, "error: %s\n", failure.message.c_str());
    return failure.code;
  }
  return kExitOk;
}
