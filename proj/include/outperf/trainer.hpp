#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "outperf/objective.hpp"
#include "outperf/policy.hpp"

namespace outperf::trainer {

struct Config {
  std::size_t max_iterations = 200;
  double grad_tolerance = 1e-3;      // stop when ||grad||_2 falls below
  double initial_trust_radius = 1.0;
  double max_trust_radius = 10.0;
  double shrink_threshold = 0.25;    // reject + halve radius below this ratio
  double expand_threshold = 0.75;    // double radius above this ratio at the boundary
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  double init_scale = 0.5;
  std::size_t hidden_width = 3;
  double fd_step = 1e-5;             // Hessian finite-difference step
  int workers = 1;

  void validate() const;
};

enum class Termination { gradient_converged, radius_collapsed, max_iterations };

struct IterationRecord {
  double objective = 0.0;  // value held after the iteration
  double grad_norm = 0.0;
  double radius = 0.0;
  bool accepted = false;
};

struct RestartReport {
  std::vector<IterationRecord> history;
  Termination termination = Termination::max_iterations;
  double final_objective = 0.0;
};

/// Training outcome. wall_seconds is informational only and is never
/// serialized, keeping report files byte-identical across reruns.
struct Report {
  policy::Params best_params;
  std::size_t best_restart = 0;
  double best_objective = 0.0;
  std::vector<RestartReport> restarts;
  double wall_seconds = 0.0;
};

struct StepResult {
  std::vector<double> step;
  double predicted_reduction = 0.0;
};

/// Dogleg solution of the trust-region subproblem
///   min g^T s + 0.5 s^T H s   s.t. ||s|| <= radius.
/// Uses the Newton point when the model is positive definite and it fits,
/// otherwise blends toward (or falls back on) the steepest-descent Cauchy
/// point. predicted_reduction is always >= 0.
StepResult trust_region_step(const std::vector<double>& grad, const Matrix& hessian,
                             double radius);

/// Multi-start trust-region Newton descent on the sample objective. Each
/// restart draws its own initial weights from the stream (seed, restart);
/// the restart with the lowest final objective wins. Deterministic given
/// (paths, spec, config).
Report train(const PathSet& paths, const objective::InvestmentSpec& spec, const Config& config);

void save_report_json(const Report& report, const std::string& path);

}  // namespace outperf::trainer
