#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "outperf/evaluate.hpp"
#include "test_util.hpp"

using namespace outperf;
using namespace outperf::evaluate;

namespace {

objective::Trajectories from_terminals(std::vector<double> adaptive, std::vector<double> bench) {
  objective::Trajectories t;
  t.n_paths = adaptive.size();
  t.n_periods = 1;
  t.n_assets = 2;
  t.adaptive = Matrix(t.n_paths, 2);
  t.benchmark = Matrix(t.n_paths, 2);
  t.allocations.assign(t.n_paths * 1 * 2, 0.5);
  for (std::size_t l = 0; l < t.n_paths; ++l) {
    t.adaptive.at(l, 0) = 10.0;
    t.benchmark.at(l, 0) = 10.0;
    t.adaptive.at(l, 1) = adaptive[l];
    t.benchmark.at(l, 1) = bench[l];
  }
  return t;
}

objective::InvestmentSpec basic_spec(std::size_t n_periods, std::size_t n_assets = 2) {
  objective::InvestmentSpec spec;
  spec.n_periods = n_periods;
  spec.horizon_years = double(n_periods);
  spec.injection = 10.0;
  spec.benchmark_weights.assign(n_assets, 1.0 / double(n_assets));
  return spec;
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("quantile uses the midpoint convention") {
  const std::vector<double> even{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile(even, 0.5) == 2.5);
  CHECK(quantile(even, 0.25) == 1.5);   // h = 1 integral -> midpoint
  CHECK(quantile(even, 0.10) == 1.0);   // ceil(0.4) = 1st order statistic
  CHECK(quantile(even, 0.95) == 4.0);
  const std::vector<double> odd{5.0, 7.0, 11.0};
  CHECK(quantile(odd, 0.5) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), parameter_error);
}

TEST_CASE("quantile is non-decreasing in the level") {
  Rng rng(40);
  std::vector<double> sample(257);
  for (double& v : sample) v = rng.normal();
  std::sort(sample.begin(), sample.end());
  double prev = -1e308;
  for (double level = 0.01; level < 1.0; level += 0.007) {
    const double q = quantile(sample, level);
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("terminal_stats hand-computed values") {
  const auto t = from_terminals({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  const auto stats = terminal_stats(t, Strategy::adaptive);
  CHECK(stats.mean == 2.0);
  CHECK(stats.median == 2.0);
  CHECK(stats.stddev == doctest::Approx(1.0).epsilon(1e-15));

  const auto equal = from_terminals({4.0, 4.0, 4.0, 4.0}, {1.0, 1.0, 1.0, 1.0});
  const auto estats = terminal_stats(equal, Strategy::adaptive, {0.9, 0.5}, {4.0, 5.0});
  CHECK(estats.stddev == 0.0);
  CHECK(estats.var_at_level.at(0.9) == 4.0);
  CHECK(estats.var_at_level.at(0.5) == 4.0);
  CHECK(estats.prob_below.at(4.0) == 0.0);  // strict inequality
  CHECK(estats.prob_below.at(5.0) == 1.0);

  const auto single = from_terminals({1.0}, {1.0});
  CHECK_THROWS_AS(terminal_stats(single, Strategy::adaptive), parameter_error);
}

TEST_CASE("prob_below is non-decreasing in the threshold") {
  Rng rng(41);
  std::vector<double> w(100);
  for (double& v : w) v = 100.0 + 10.0 * rng.normal();
  const auto t = from_terminals(w, w);
  const auto stats = terminal_stats(t, Strategy::adaptive, {0.9}, {80.0, 95.0, 100.0, 105.0, 120.0});
  double prev = 0.0;
  for (const auto& [threshold, prob] : stats.prob_below) {
    CHECK(prob >= prev);
    prev = prob;
  }
}

TEST_CASE("cross_prob") {
  SUBCASE("identical strategies never strictly underperform pathwise") {
    const std::vector<double> w{3.0, 1.0, 2.0, 5.0};
    const auto cross = cross_prob(w, w);
    CHECK(cross.adaptive_below_pathwise == 0.0);
  }
  SUBCASE("uniform +1 shift favors the adaptive side") {
    const std::vector<double> bench{1.0, 2.0, 3.0, 4.0};
    std::vector<double> adaptive = bench;
    for (double& v : adaptive) v += 1.0;
    const auto cross = cross_prob(adaptive, bench);
    CHECK(cross.adaptive_below_pathwise == 0.0);
    CHECK(cross.adaptive_below_benchmark_median == 0.25);  // only 2.0 < 2.5
    CHECK(cross.benchmark_below_adaptive_median == 0.75);  // 1,2,3 < 3.5
  }
  SUBCASE("pathwise probability plus its complement is exactly one") {
    Rng rng(42);
    std::vector<double> a(301), b(301);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = std::exp(rng.normal());
      b[i] = std::exp(rng.normal());
    }
    const auto cross = cross_prob(a, b);
    std::size_t geq = 0;
    for (std::size_t i = 0; i < a.size(); ++i) geq += a[i] >= b[i];
    CHECK(cross.adaptive_below_pathwise + double(geq) / double(a.size()) == 1.0);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(cross_prob({1.0}, {1.0, 2.0}), alignment_error);
  }
}

TEST_CASE("cdf_points") {
  CHECK(cdf_points({5.0}) == std::vector<std::pair<double, double>>{{5.0, 1.0}});
  const auto two = cdf_points({2.0, 1.0});
  CHECK(two[0] == std::pair<double, double>{1.0, 0.5});
  CHECK(two[1] == std::pair<double, double>{2.0, 1.0});
  const auto many = cdf_points({3.0, 1.0, 2.0, 2.0});
  CHECK(many.back().second == 1.0);  // final height exactly one
  for (std::size_t i = 1; i < many.size(); ++i) {
    CHECK(many[i].first >= many[i - 1].first);
    CHECK(many[i].second > many[i - 1].second);
  }
}

TEST_CASE("percentile_fan") {
  SUBCASE("identical strategies give an identically zero wealth-diff fan") {
    const auto paths = testutil::random_pathset(12, 6, 2, 50);
    const auto params = testutil::uniform_policy(3, 2);
    const auto t = objective::simulate_wealth(params, paths, basic_spec(6));
    const auto fan = percentile_fan(t, FanStatistic::wealth_diff, 6.0);
    REQUIRE(fan.times.size() == 7);  // t_0 .. t_N
    for (double v : fan.values.data) CHECK(v == 0.0);
    for (double v : fan.mean) CHECK(v == 0.0);
  }
  SUBCASE("two constant-diff paths have the midpoint as median") {
    auto t = from_terminals({10.0, 20.0}, {10.0, 10.0});
    // columns: post-injection 10/10, terminal 10/20 vs 10/10 -> diffs 0 and 10
    const auto fan = percentile_fan(t, FanStatistic::wealth_diff, 1.0, {50});
    CHECK(fan.values.at(1, 0) == 5.0);
  }
  SUBCASE("allocation fan of a constant-proportion policy is flat") {
    const auto paths = testutil::random_pathset(9, 5, 2, 51);
    const auto params = testutil::uniform_policy(3, 2);
    const auto t = objective::simulate_wealth(params, paths, basic_spec(5));
    const auto fan = percentile_fan(t, FanStatistic::stock_allocation, 5.0);
    REQUIRE(fan.times.size() == 5);  // decision times only
    for (double v : fan.values.data) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("percentile columns are non-decreasing at every time") {
    const auto paths = testutil::random_pathset(40, 6, 2, 52);
    Rng rng(7);
    const auto params = policy::init_params(rng, 0.5, 3, 2);
    const auto t = objective::simulate_wealth(params, paths, basic_spec(6));
    const auto fan = percentile_fan(t, FanStatistic::relative_wealth_diff, 6.0);
    for (std::size_t row = 0; row < fan.times.size(); ++row) {
      for (std::size_t q = 1; q < fan.levels.size(); ++q) {
        CHECK(fan.values.at(row, q) >= fan.values.at(row, q - 1));
      }
    }
  }
}

TEST_CASE("allocation_heatmap") {
  const auto paths = testutil::random_pathset(10, 4, 2, 60);
  const auto params = testutil::uniform_policy(3, 2);
  const auto t = objective::simulate_wealth(params, paths, basic_spec(4));
  SUBCASE("constant policy puts 0.5 in every occupied cell") {
    const auto grid = allocation_heatmap(t, 4.0, 4, 5);
    std::size_t total = 0;
    for (std::size_t i = 0; i < grid.counts.size(); ++i) {
      total += grid.counts[i];
      if (grid.counts[i] > 0) {
        CHECK(grid.mean_allocation.data[i] == doctest::Approx(0.5).epsilon(1e-15));
      } else {
        CHECK(std::isnan(grid.mean_allocation.data[i]));  // empty, not zero
      }
    }
    CHECK(total == 10 * 4);  // counts partition all (path, time) observations
  }
  SUBCASE("single cell averages everything") {
    const auto grid = allocation_heatmap(t, 4.0, 1, 1);
    CHECK(grid.counts[0] == 10 * 4);
    CHECK(grid.mean_allocation.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("backtest_single_path") {
  const auto spec = basic_spec(4);
  SUBCASE("flat path accumulates q*N") {
    ReturnPath flat;
    flat.returns = Matrix(4, 2, 1.0);
    const auto records = backtest_single_path(testutil::uniform_policy(3, 2), flat, spec);
    REQUIRE(records.size() == 5);
    CHECK(records.back().wealth == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(records.back().benchmark_wealth == doctest::Approx(40.0).epsilon(1e-12));
  }
  SUBCASE("uniform policy tracks the benchmark exactly") {
    const auto paths = testutil::random_pathset(1, 4, 2, 61);
    ReturnPath rp;
    rp.returns = Matrix(4, 2);
    std::copy(paths.data.begin(), paths.data.end(), rp.returns.data.begin());
    const auto records = backtest_single_path(testutil::uniform_policy(3, 2), rp, spec);
    for (const auto& rec : records) CHECK(rec.wealth == rec.benchmark_wealth);
  }
  SUBCASE("emitted allocations are valid weights") {
    const auto paths = testutil::random_pathset(1, 4, 2, 62);
    ReturnPath rp;
    rp.returns = Matrix(4, 2);
    std::copy(paths.data.begin(), paths.data.end(), rp.returns.data.begin());
    Rng rng(63);
    const auto params = policy::init_params(rng, 0.5, 3, 2);
    const auto records = backtest_single_path(params, rp, spec);
    for (std::size_t n = 0; n + 1 < records.size(); ++n) {
      double sum = 0.0;
      for (double w : records[n].allocation) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        sum += w;
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
  }
  SUBCASE("length mismatch raises a shape error") {
    ReturnPath rp;
    rp.returns = Matrix(3, 2, 1.0);
    CHECK_THROWS_AS(backtest_single_path(testutil::uniform_policy(3, 2), rp, spec), shape_error);
  }
}

TEST_CASE("statistics are invariant under path permutation") {
  const auto paths = testutil::random_pathset(20, 5, 2, 70);
  Rng rng(71);
  const auto params = policy::init_params(rng, 0.5, 3, 2);
  const auto t = objective::simulate_wealth(params, paths, basic_spec(5));

  PathSet shuffled = paths;
  std::vector<std::size_t> order(paths.n_paths);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = (i * 7 + 3) % order.size();
  const std::size_t stride = 5 * 2;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::copy(paths.data.begin() + order[i] * stride, paths.data.begin() + (order[i] + 1) * stride,
              shuffled.data.begin() + i * stride);
  }
  const auto ts = objective::simulate_wealth(params, shuffled, basic_spec(5));
  const auto a = terminal_stats(t, Strategy::adaptive, {0.9}, {});
  const auto b = terminal_stats(ts, Strategy::adaptive, {0.9}, {});
  CHECK(a.median == b.median);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-13));
  CHECK(a.var_at_level.at(0.9) == b.var_at_level.at(0.9));
}

}  // TEST_SUITE
