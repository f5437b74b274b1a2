/*
 * outperf - benchmark-outperformance allocation policy toolkit.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed here; every fallible call returns an opf_status and leaves a
 * human-readable message in opf_last_error() on failure. Handles are not
 * thread-safe for concurrent mutation, but distinct handles may be used from
 * distinct threads freely.
 */
#ifndef OUTPERF_H
#define OUTPERF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opf_status {
  OPF_OK = 0,
  OPF_ERROR_INVALID_ARGUMENT = 1, /* bad handle/pointer or parameter out of range */
  OPF_ERROR_PARSE = 2,            /* malformed input file */
  OPF_ERROR_ALIGNMENT = 3,        /* mismatched date axes or sample lengths */
  OPF_ERROR_SHAPE = 4,            /* inconsistent matrix/tensor dimensions */
  OPF_ERROR_IO = 5,               /* filesystem failure */
  OPF_ERROR_NUMERIC = 6,          /* non-finite values or optimizer failure */
  OPF_ERROR_INTERNAL = 7
} opf_status;

/* Message describing the most recent failure on this thread. Never NULL. */
const char* opf_last_error(void);
const char* opf_version(void);

/* ---------------------------------------------------------------------- */
/* Opaque handles                                                          */

typedef struct opf_index_series opf_index_series;
typedef struct opf_panel opf_panel;
typedef struct opf_pathset opf_pathset;
typedef struct opf_policy opf_policy;
typedef struct opf_trajectories opf_trajectories;
typedef struct opf_train_report opf_train_report;

/* ---------------------------------------------------------------------- */
/* Market data                                                             */

/* CSV format: header "date,<name>", rows "YYYY-MM,<positive level>". */
opf_status opf_index_load_csv(const char* path, opf_index_series** out);
opf_status opf_index_deflate(const opf_index_series* nominal, const opf_index_series* cpi,
                             opf_index_series** out);
void opf_index_free(opf_index_series* series);

/* Converts each (already deflated) index to gross monthly returns and
 * assembles the aligned panel. */
opf_status opf_panel_from_indexes(const opf_index_series* const* series, size_t count,
                                  opf_panel** out);
opf_status opf_panel_load_csv(const char* path, opf_panel** out);
opf_status opf_panel_save_csv(const opf_panel* panel, const char* path);
opf_status opf_panel_shape(const opf_panel* panel, uint64_t* months, uint64_t* assets);
void opf_panel_free(opf_panel* panel);

/* ---------------------------------------------------------------------- */
/* Path generation                                                         */

typedef struct opf_bootstrap_config {
  int stationary;            /* 1 = geometric blocksizes, 0 = fixed */
  double expected_blocksize; /* months; integer-valued when fixed */
  uint64_t path_length;      /* months per resampled path */
} opf_bootstrap_config;

opf_status opf_bootstrap_resample(const opf_panel* panel, const opf_bootstrap_config* config,
                                  uint64_t n_paths, uint64_t seed, int workers,
                                  opf_pathset** out);

/* Compounds groups of months_per_period consecutive monthly returns. */
opf_status opf_pathset_compound(const opf_pathset* monthly, uint64_t months_per_period,
                                opf_pathset** out);

/* Closed-form identical-path probabilities (natural log). */
opf_status opf_prob_identical_fixed(uint64_t n, uint64_t n_tot, uint64_t b1, uint64_t b2,
                                    double* log_prob);
opf_status opf_prob_identical_stationary(uint64_t n, uint64_t n_tot, double b1, double b2,
                                         double* log_prob);

/* Monte Carlo estimate of the identical-path probability over an alphabet of
 * n_tot distinct symbols. Feasible for tiny path lengths only. */
opf_status opf_mc_prob_identical(const opf_bootstrap_config* config1,
                                 const opf_bootstrap_config* config2, uint64_t n_tot,
                                 uint64_t trials, uint64_t seed, double* estimate,
                                 double* std_error);

typedef struct opf_kou_params {
  double mu;
  double sigma;
  double lambda; /* jump intensity per year */
  double p_up;
  double eta1;
  double eta2;
  double r;
} opf_kou_params;

/* Calibrated stock/bond preset. */
opf_status opf_kou_default_params(opf_kou_params* out);
/* key=value file with keys mu, sigma, lambda, p_up, eta1, eta2, r. */
opf_status opf_kou_load_params(const char* path, opf_kou_params* out);
opf_status opf_kou_simulate(const opf_kou_params* params, uint64_t n_periods, double dt_years,
                            uint64_t n_paths, uint64_t seed, int workers, opf_pathset** out);

/* Binary container plus ".json" sidecar with provenance. */
opf_status opf_pathset_save(const opf_pathset* paths, const char* path);
opf_status opf_pathset_load(const char* path, opf_pathset** out);
opf_status opf_pathset_shape(const opf_pathset* paths, uint64_t* n_paths, uint64_t* n_periods,
                             uint64_t* n_assets);
void opf_pathset_free(opf_pathset* paths);

/* ---------------------------------------------------------------------- */
/* Objective and training                                                  */

enum {
  OPF_MODE_SHORTFALL = 0,          /* mean min(W - W_b, 0)^2 */
  OPF_MODE_SHORTFALL_ELEVATED = 1, /* mean min(W - e^{sT} W_b, 0)^2 */
  OPF_MODE_ASYMMETRIC = 2          /* smoothed quadratic-below / linear-above */
};

typedef struct opf_investment_spec {
  uint64_t n_periods;               /* N rebalance periods */
  double horizon_years;             /* T */
  double injection;                 /* q, cash added at each decision time */
  const double* benchmark_weights;  /* n_assets entries summing to 1 */
  uint64_t n_assets;
  double spread;                    /* s, per year */
  int mode;                         /* OPF_MODE_* */
  double epsilon;                   /* smoothing width */
} opf_investment_spec;

typedef struct opf_train_config {
  uint64_t max_iterations;
  double grad_tolerance;
  double initial_trust_radius;
  double max_trust_radius;
  uint64_t restarts;
  uint64_t seed;
  double init_scale;
  uint64_t hidden_width;
  int workers;
} opf_train_config;

opf_status opf_train_config_default(opf_train_config* out);
opf_status opf_train(const opf_pathset* paths, const opf_investment_spec* spec,
                     const opf_train_config* config, opf_policy** policy_out,
                     opf_train_report** report_out);
opf_status opf_train_report_best_objective(const opf_train_report* report, double* out);
opf_status opf_train_report_save(const opf_train_report* report, const char* path);
void opf_train_report_free(opf_train_report* report);

opf_status opf_policy_save(const opf_policy* policy, const char* path);
opf_status opf_policy_load(const char* path, opf_policy** out);
/* Allocation weights for a raw 3-feature input; weights_out must hold the
 * policy's asset count. */
opf_status opf_policy_allocate(const opf_policy* policy, const double* features3,
                               double* weights_out, uint64_t n_assets);
void opf_policy_free(opf_policy* policy);

opf_status opf_sample_objective(const opf_policy* policy, const opf_pathset* paths,
                                const opf_investment_spec* spec, double* out);

/* ---------------------------------------------------------------------- */
/* Evaluation                                                              */

opf_status opf_simulate_wealth(const opf_policy* policy, const opf_pathset* paths,
                               const opf_investment_spec* spec, opf_trajectories** out);
void opf_trajectories_free(opf_trajectories* trajectories);

typedef struct opf_wealth_stats {
  double mean;
  double stddev;
  double median;
  double var;         /* wealth quantile at the requested VaR level */
  double prob_below;  /* Pr[W_T < below_threshold] */
} opf_wealth_stats;

enum { OPF_STRATEGY_ADAPTIVE = 0, OPF_STRATEGY_BENCHMARK = 1 };

opf_status opf_eval_terminal_stats(const opf_trajectories* trajectories, int strategy,
                                   double var_level, double below_threshold,
                                   opf_wealth_stats* out);
opf_status opf_eval_cross_prob(const opf_trajectories* trajectories,
                               double* adaptive_below_benchmark_median,
                               double* benchmark_below_adaptive_median,
                               double* adaptive_below_pathwise);

/* Plot-ready CSV / JSON emitters; formats documented in the README. */
enum { OPF_CDF_ADAPTIVE = 0, OPF_CDF_BENCHMARK = 1, OPF_CDF_WEALTH_DIFF = 2 };
opf_status opf_eval_write_cdf_csv(const opf_trajectories* trajectories, int what,
                                  const char* path);

enum {
  OPF_FAN_WEALTH_DIFF = 0,
  OPF_FAN_RELATIVE_WEALTH_DIFF = 1,
  OPF_FAN_STOCK_ALLOCATION = 2
};
opf_status opf_eval_write_fan_csv(const opf_trajectories* trajectories, int statistic,
                                  const char* path);
opf_status opf_eval_write_heatmap_csv(const opf_trajectories* trajectories, uint64_t time_bins,
                                      uint64_t diff_bins, const char* path);
opf_status opf_eval_write_summary_json(const opf_trajectories* trajectories, double var_level,
                                       const char* path);

/* Forward pass along one supplied path (CSV: header "period,<names...>",
 * optionally monthly rows compounded via months_per_period > 1); writes the
 * per-period wealth/allocation table to out_csv. */
opf_status opf_backtest_csv(const opf_policy* policy, const char* returns_csv,
                            uint64_t months_per_period, const opf_investment_spec* spec,
                            const char* out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OUTPERF_H */
