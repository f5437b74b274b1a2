#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "outperf/trainer.hpp"
#include "test_util.hpp"

using namespace outperf;
using namespace outperf::trainer;

namespace {

objective::InvestmentSpec shortfall_spec(std::size_t n_periods) {
  objective::InvestmentSpec spec;
  spec.n_periods = n_periods;
  spec.horizon_years = double(n_periods);
  spec.injection = 10.0;
  spec.benchmark_weights = {0.5, 0.5};
  spec.mode = objective::Mode::shortfall_vs_benchmark;
  return spec;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("trust_region_step solves the quadratic subproblem") {
  SUBCASE("zero gradient gives zero step") {
    Matrix h(3, 3);
    h.at(0, 0) = h.at(1, 1) = h.at(2, 2) = 1.0;
    const auto result = trust_region_step({0.0, 0.0, 0.0}, h, 5.0);
    CHECK(result.step == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(result.predicted_reduction == 0.0);
  }
  SUBCASE("interior Newton point on an identity bowl") {
    Matrix h(3, 3);
    h.at(0, 0) = h.at(1, 1) = h.at(2, 2) = 1.0;
    const auto result = trust_region_step({2.0, 0.0, 0.0}, h, 10.0);
    CHECK(result.step[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(result.step[1] == 0.0);
    CHECK(result.predicted_reduction == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("radius-limited step lands on the boundary") {
    Matrix h(3, 3);
    h.at(0, 0) = h.at(1, 1) = h.at(2, 2) = 1.0;
    const auto result = trust_region_step({2.0, 0.0, 0.0}, h, 1.0);
    CHECK(result.step[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(result.predicted_reduction == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("indefinite model falls back to the Cauchy point") {
    Matrix h(2, 2);
    h.at(0, 0) = -4.0;
    h.at(1, 1) = -1.0;
    const auto result = trust_region_step({1.0, 0.0}, h, 0.5);
    CHECK(result.step[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(result.predicted_reduction > 0.0);
  }
}

TEST_CASE("training recovers the known optimum of the plain shortfall objective") {
  const auto paths = testutil::random_pathset(128, 8, 2, 21);
  const auto spec = shortfall_spec(8);
  Config config;
  config.restarts = 2;
  config.max_iterations = 60;
  config.seed = 5;
  const auto report = train(paths, spec, config);
  const double bound = 1e-6 * std::pow(spec.injection * double(spec.n_periods), 2);
  CHECK(report.best_objective <= bound);
  CHECK(report.restarts.size() == 2);
}

TEST_CASE("flat market converges immediately") {
  const auto paths = testutil::flat_pathset(32, 6, 2);
  auto spec = shortfall_spec(6);
  Config config;
  config.restarts = 1;
  config.seed = 3;
  const auto report = train(paths, spec, config);
  CHECK(report.best_objective == 0.0);
  CHECK(report.restarts[0].termination == Termination::gradient_converged);
  CHECK(report.restarts[0].history.empty());  // converged before any step
}

TEST_CASE("training is deterministic given the seed") {
  const auto paths = testutil::random_pathset(64, 6, 2, 9);
  auto spec = shortfall_spec(6);
  spec.mode = objective::Mode::asymmetric;
  Config config;
  config.restarts = 2;
  config.max_iterations = 15;
  config.seed = 11;
  const auto a = train(paths, spec, config);
  const auto b = train(paths, spec, config);
  CHECK(a.best_objective == b.best_objective);
  CHECK(a.best_params.input_weights == b.best_params.input_weights);
  CHECK(a.best_params.output_weights == b.best_params.output_weights);
  REQUIRE(a.restarts.size() == b.restarts.size());
  for (std::size_t r = 0; r < a.restarts.size(); ++r) {
    REQUIRE(a.restarts[r].history.size() == b.restarts[r].history.size());
    for (std::size_t i = 0; i < a.restarts[r].history.size(); ++i) {
      CHECK(a.restarts[r].history[i].objective == b.restarts[r].history[i].objective);
    }
  }
}

TEST_CASE("objective history is non-increasing over accepted steps") {
  const auto paths = testutil::random_pathset(64, 6, 2, 13);
  auto spec = shortfall_spec(6);
  spec.mode = objective::Mode::asymmetric;
  Config config;
  config.restarts = 3;
  config.max_iterations = 25;
  config.seed = 17;
  const auto report = train(paths, spec, config);
  for (const auto& restart : report.restarts) {
    double last = std::numeric_limits<double>::infinity();
    for (const auto& record : restart.history) {
      if (record.accepted) {
        CHECK(record.objective <= last);
        last = record.objective;
      }
    }
  }
}

TEST_CASE("parameter count is d*l + l*M") {
  const auto paths = testutil::random_pathset(16, 4, 2, 1);
  auto spec = shortfall_spec(4);
  Config config;
  config.restarts = 1;
  config.max_iterations = 1;
  const auto report = train(paths, spec, config);
  CHECK(report.best_params.size() == 3 * 3 + 3 * 2);
}

TEST_CASE("report JSON serialization is stable and omits wall time") {
  const auto paths = testutil::random_pathset(32, 4, 2, 2);
  auto spec = shortfall_spec(4);
  Config config;
  config.restarts = 1;
  config.max_iterations = 5;
  const auto report = train(paths, spec, config);
  const auto dir = std::filesystem::temp_directory_path();
  save_report_json(report, (dir / "report_a.json").string());
  save_report_json(report, (dir / "report_b.json").string());
  std::ifstream a(dir / "report_a.json"), b(dir / "report_b.json");
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.find("wall") == std::string::npos);
  CHECK(sa.find("\"best_objective\"") != std::string::npos);
  CHECK(sa.find("\"grad_norm\"") != std::string::npos);
}

TEST_CASE("invalid configs are rejected") {
  Config config;
  config.restarts = 0;
  CHECK_THROWS_AS(config.validate(), parameter_error);
  config = Config{};
  config.grad_tolerance = 0.0;
  CHECK_THROWS_AS(config.validate(), parameter_error);
  config = Config{};
  config.max_trust_radius = 0.1;  // below initial
  CHECK_THROWS_AS(config.validate(), parameter_error);
}

}  // TEST_SUITE
