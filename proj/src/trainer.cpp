#include "outperf/trainer.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "outperf/io.hpp"
#include "outperf/rng.hpp"

namespace outperf::trainer {

namespace {

constexpr double kRadiusCollapse = 1e-12;
constexpr int kMaxInitRetries = 16;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void Config::validate() const {
  if (max_iterations == 0) throw parameter_error("trainer: max_iterations must be >= 1");
  if (!(grad_tolerance > 0.0)) throw parameter_error("trainer: grad_tolerance must be > 0");
  if (restarts == 0) throw parameter_error("trainer: restarts must be >= 1");
  if (!(initial_trust_radius > 0.0) || !(max_trust_radius >= initial_trust_radius)) {
    throw parameter_error("trainer: trust radii must satisfy 0 < initial <= max");
  }
  if (!(shrink_threshold > 0.0 && shrink_threshold < expand_threshold && expand_threshold < 1.0)) {
    throw parameter_error("trainer: need 0 < shrink < expand < 1");
  }
  if (!(init_scale > 0.0)) throw parameter_error("trainer: init_scale must be > 0");
  if (hidden_width == 0) throw parameter_error("trainer: hidden width must be >= 1");
  if (!(fd_step > 0.0)) throw parameter_error("trainer: fd_step must be > 0");
}

StepResult trust_region_step(const std::vector<double>& grad, const Matrix& hessian,
                             double radius) {
  if (!(radius > 0.0)) throw parameter_error("trust_region_step: radius must be > 0");
  const auto n = static_cast<Eigen::Index>(grad.size());
  if (hessian.rows != grad.size() || hessian.cols != grad.size()) {
    throw shape_error("trust_region_step: Hessian shape mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> g(grad.data(), n);
  const Eigen::Map<const Eigen::MatrixXd> h(hessian.data.data(), n, n);  // symmetric

  StepResult result;
  result.step.assign(grad.size(), 0.0);
  const double gnorm = g.norm();
  if (gnorm == 0.0) return result;

  auto finish = [&](const Eigen::VectorXd& s) {
    Eigen::Map<Eigen::VectorXd>(result.step.data(), n) = s;
    result.predicted_reduction = -(g.dot(s) + 0.5 * s.dot(h * s));
    if (!(result.predicted_reduction > 0.0) || !s.allFinite()) {
      result.step.assign(grad.size(), 0.0);
      result.predicted_reduction = 0.0;
    }
    return result;
  };

  const double ghg = g.dot(h * g);
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd newton = -llt.solve(g);
    if (newton.allFinite() && newton.norm() <= radius) {
      return finish(newton);  // unconstrained model minimum inside the region
    }
    if (newton.allFinite() && ghg > 0.0) {
      // Dogleg: walk from the steepest-descent minimizer toward the Newton
      // point and stop at the boundary.
      const Eigen::VectorXd cauchy = -(g.dot(g) / ghg) * g;
      const double cnorm = cauchy.norm();
      if (cnorm >= radius) {
        return finish(Eigen::VectorXd(-(radius / gnorm) * g));
      }
      const Eigen::VectorXd leg = newton - cauchy;
      const double a = leg.squaredNorm();
      if (a == 0.0) return finish(cauchy);
      const double b = 2.0 * cauchy.dot(leg);
      const double c = cnorm * cnorm - radius * radius;
      const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
      return finish(Eigen::VectorXd(cauchy + tau * leg));
    }
  }
  // Non-positive-definite model: fall back to the Cauchy point.
  const double tau = ghg > 0.0 ? std::min(radius, gnorm * gnorm * gnorm / ghg) : radius;
  return finish(Eigen::VectorXd(-(tau / gnorm) * g));
}

namespace {

RestartReport run_restart(policy::Params& params, const PathSet& paths,
                          const objective::InvestmentSpec& spec, const Config& config) {
  RestartReport report;
  report.termination = Termination::max_iterations;
  std::vector<double> grad;
  double value = objective::value_and_gradient(params, paths, spec, grad, config.workers);
  if (!std::isfinite(value)) throw numeric_error("trainer: non-finite starting objective");
  double grad_norm = norm2(grad);
  if (!std::isfinite(grad_norm)) throw numeric_error("trainer: non-finite starting gradient");
  double radius = config.initial_trust_radius;
  std::vector<double> flat = params.flatten();
  policy::Params candidate = params;

  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    if (grad_norm < config.grad_tolerance) {
      report.termination = Termination::gradient_converged;
      break;
    }
    const Matrix hess = objective::fd_hessian(params, paths, spec, config.fd_step, config.workers);
    const StepResult sub = trust_region_step(grad, hess, radius);

    bool accepted = false;
    if (sub.predicted_reduction > 0.0) {
      std::vector<double> trial = flat;
      for (std::size_t j = 0; j < trial.size(); ++j) trial[j] += sub.step[j];
      candidate.assign_flat(trial);
      const double trial_value = objective::sample_objective(candidate, paths, spec, config.workers);
      const double ratio = std::isfinite(trial_value)
                               ? (value - trial_value) / sub.predicted_reduction
                               : -1.0;
      if (ratio > config.shrink_threshold && trial_value <= value) {
        flat = std::move(trial);
        params.assign_flat(flat);
        value = objective::value_and_gradient(params, paths, spec, grad, config.workers);
        grad_norm = norm2(grad);
        accepted = true;
      }
      if (ratio < config.shrink_threshold) {
        radius *= 0.5;
      } else if (ratio > config.expand_threshold && norm2(sub.step) >= 0.99 * radius) {
        radius = std::min(2.0 * radius, config.max_trust_radius);
      }
    } else {
      radius *= 0.5;  // model could not produce a descent step
    }
    report.history.push_back({value, grad_norm, radius, accepted});
    if (radius < kRadiusCollapse) {
      report.termination = Termination::radius_collapsed;
      break;
    }
  }
  if (grad_norm < config.grad_tolerance) report.termination = Termination::gradient_converged;
  report.final_objective = value;
  return report;
}

}  // namespace

Report train(const PathSet& paths, const objective::InvestmentSpec& spec, const Config& config) {
  config.validate();
  spec.validate();
  if (paths.n_paths == 0) throw parameter_error("train: empty path set");

  const auto t0 = std::chrono::steady_clock::now();
  Report report;
  report.best_objective = std::numeric_limits<double>::infinity();

  for (std::size_t restart = 0; restart < config.restarts; ++restart) {
    Rng rng = Rng::for_stream(config.seed, restart);
    policy::Params params;
    bool started = false;
    std::vector<double> probe_grad;
    for (int attempt = 0; attempt < kMaxInitRetries && !started; ++attempt) {
      params = policy::init_params(rng, config.init_scale, config.hidden_width, paths.n_assets);
      const double value =
          objective::value_and_gradient(params, paths, spec, probe_grad, config.workers);
      started = std::isfinite(value) && std::isfinite(norm2(probe_grad));
    }
    if (!started) throw numeric_error("train: could not find a finite starting point");

    RestartReport rr = run_restart(params, paths, spec, config);
    if (rr.final_objective < report.best_objective) {
      report.best_objective = rr.final_objective;
      report.best_params = params;
      report.best_restart = restart;
    }
    report.restarts.push_back(std::move(rr));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

void save_report_json(const Report& report, const std::string& path) {
  // Hand-rolled emission with fixed key order and format_double values so
  // rerunning with the same inputs yields byte-identical files. wall_seconds
  // is intentionally omitted.
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  auto term_name = [](Termination t) {
    switch (t) {
      case Termination::gradient_converged: return "gradient_converged";
      case Termination::radius_collapsed: return "radius_collapsed";
      default: return "max_iterations";
    }
  };
  out << "{\n  \"best_restart\": " << report.best_restart << ",\n  \"best_objective\": "
      << io::format_double(report.best_objective) << ",\n  \"restarts\": [\n";
  for (std::size_t r = 0; r < report.restarts.size(); ++r) {
    const auto& rr = report.restarts[r];
    out << "    {\n      \"termination\": \"" << term_name(rr.termination)
        << "\",\n      \"final_objective\": " << io::format_double(rr.final_objective)
        << ",\n      \"iterations\": [\n";
    for (std::size_t i = 0; i < rr.history.size(); ++i) {
      const auto& it = rr.history[i];
      out << "        {\"objective\": " << io::format_double(it.objective)
          << ", \"grad_norm\": " << io::format_double(it.grad_norm)
          << ", \"radius\": " << io::format_double(it.radius)
          << ", \"accepted\": " << (it.accepted ? "true" : "false") << "}"
          << (i + 1 < rr.history.size() ? "," : "") << "\n";
    }
    out << "      ]\n    }" << (r + 1 < report.restarts.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace outperf::trainer
