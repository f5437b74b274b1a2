#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "outperf/market_data.hpp"

using namespace outperf;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

IndexSeries make_series(std::vector<double> levels, int start_year = 1926) {
  IndexSeries s;
  s.name = "test";
  YearMonth ym{start_year, 1};
  for (double level : levels) {
    s.dates.push_back(ym);
    s.levels.push_back(level);
    ym = ym.next();
  }
  return s;
}

}  // namespace

TEST_SUITE("market_data") {

TEST_CASE("load_index_csv parses a minimal file") {
  const auto path = write_temp("md_min.csv", "date,spx\n1926-01,100\n1926-02,101\n");
  const auto series = load_index_csv(path);
  CHECK(series.name == "spx");
  CHECK(series.levels == std::vector<double>{100.0, 101.0});
  CHECK(series.dates.front() == YearMonth{1926, 1});
}

TEST_CASE("load_index_csv rejects non-positive levels, naming the line") {
  const auto path = write_temp("md_zero.csv", "date,spx\n1926-01,100\n1926-02,0\n");
  CHECK_THROWS_WITH_AS(load_index_csv(path), doctest::Contains("non-positive index level"),
                       parse_error);
  CHECK_THROWS_WITH_AS(load_index_csv(path), doctest::Contains(":3"), parse_error);
}

TEST_CASE("load_index_csv rejects calendar gaps and duplicates") {
  const auto gap = write_temp("md_gap.csv", "date,spx\n1926-01,100\n1926-03,101\n");
  CHECK_THROWS_WITH_AS(load_index_csv(gap), doctest::Contains("calendar gap"), parse_error);
  const auto dup = write_temp("md_dup.csv", "date,spx\n1926-01,100\n1926-01,101\n");
  CHECK_THROWS_WITH_AS(load_index_csv(dup), doctest::Contains("duplicate"), parse_error);
}

TEST_CASE("load_index_csv rejects December-to-next-year gaps") {
  const auto path = write_temp("md_year.csv", "date,spx\n1926-12,100\n1927-02,101\n");
  CHECK_THROWS_AS(load_index_csv(path), parse_error);
  const auto ok = write_temp("md_year_ok.csv", "date,spx\n1926-12,100\n1927-01,101\n");
  CHECK(load_index_csv(ok).levels.size() == 2);
}

TEST_CASE("deflate divides same-dated levels") {
  const auto nominal = make_series({100, 110});
  SUBCASE("identity when CPI is flat at the same level") {
    const auto real = deflate(make_series({100, 100}), make_series({100, 100}));
    CHECK(real.levels == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("direct division") {
    const auto real = deflate(nominal, make_series({100, 100}));
    CHECK(real.levels == std::vector<double>{1.0, 1.1});
  }
  SUBCASE("inflation cancels growth") {
    const auto real = deflate(nominal, make_series({100, 110}));
    CHECK(real.levels == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("date-axis mismatch is an alignment error") {
    CHECK_THROWS_AS(deflate(nominal, make_series({100, 100}, 1950)), alignment_error);
  }
}

TEST_CASE("to_returns produces gross ratios") {
  CHECK(to_returns(make_series({100, 110})) == std::vector<double>{1.1});
  const auto r = to_returns(make_series({100, 110, 99}));
  CHECK(r[0] == doctest::Approx(1.10).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(0.90).epsilon(1e-15));
  CHECK(to_returns(make_series({50, 50, 50})) == std::vector<double>{1.0, 1.0});
}

TEST_CASE("to_returns round-trips the level series") {
  const auto series = make_series({100, 103.5, 99.25, 120.125, 119.875, 140.0625});
  const auto returns = to_returns(series);
  double level = series.levels.front();
  for (std::size_t i = 0; i < returns.size(); ++i) {
    level *= returns[i];
    CHECK(level == doctest::Approx(series.levels[i + 1]).epsilon(1e-12));
  }
}

TEST_CASE("deflate is homogeneous in the CPI scale") {
  const auto nominal = make_series({100, 104, 98, 113, 121});
  auto cpi = make_series({100, 101, 102.5, 103, 105});
  const auto base = to_returns(deflate(nominal, cpi));
  for (double& level : cpi.levels) level *= 7.25;
  const auto scaled = to_returns(deflate(nominal, cpi));
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled[i] == doctest::Approx(base[i]).epsilon(1e-12));
  }
}

TEST_CASE("build_panel validates alignment") {
  const std::vector<YearMonth> dates{{1926, 1}, {1926, 2}, {1926, 3}};
  const auto panel = build_panel({{1.1, 1.0, 0.9}, {1.0, 1.01, 1.02}}, {"stock", "bond"}, dates);
  CHECK(panel.returns.rows == 3);
  CHECK(panel.returns.cols == 2);
  CHECK(panel.returns.at(2, 0) == 0.9);

  CHECK_THROWS_AS(build_panel({{1.1, 1.0}, {1.0}}, {"a", "b"}, dates), alignment_error);
  const auto single = build_panel({{1.1, 1.0, 0.9}}, {"solo"}, dates);
  CHECK(single.returns.cols == 1);
}

TEST_CASE("compound_to_periods multiplies consecutive months") {
  Matrix monthly(3, 1);
  monthly.data = {1.1, 1.0, 0.9};
  const auto path = compound_to_periods(monthly, 3);
  CHECK(path.returns.rows == 1);
  CHECK(path.returns.at(0, 0) == doctest::Approx(0.99).epsilon(1e-15));
}

TEST_CASE("compound_to_periods is the identity at one month per period") {
  Matrix monthly(5, 2);
  for (std::size_t i = 0; i < monthly.data.size(); ++i) monthly.data[i] = 1.0 + 0.01 * double(i);
  const auto path = compound_to_periods(monthly, 1);
  CHECK(path.returns.data == monthly.data);
}

TEST_CASE("compound_to_periods matches an extended-precision product oracle") {
  Matrix monthly(12, 1);
  monthly.data.assign(12, 1.01);
  const auto path = compound_to_periods(monthly, 12);
  long double oracle = 1.0L;
  for (int i = 0; i < 12; ++i) oracle *= 1.01L;
  CHECK(path.returns.at(0, 0) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-13));
  CHECK(path.returns.at(0, 0) == doctest::Approx(1.1268250301319697).epsilon(1e-12));
}

TEST_CASE("compound_to_periods rejects an incomplete final period") {
  Matrix monthly(13, 1, 1.0);
  CHECK_THROWS_WITH_AS(compound_to_periods(monthly, 12), doctest::Contains("incomplete final period"),
                       parameter_error);
}

TEST_CASE("flat monthly returns compound to flat period returns") {
  Matrix monthly(24, 2, 1.0);
  const auto path = compound_to_periods(monthly, 12);
  for (double v : path.returns.data) CHECK(v == 1.0);
}

TEST_CASE("panel CSV round trip") {
  const std::vector<YearMonth> dates{{2000, 11}, {2000, 12}, {2001, 1}};
  const auto panel =
      build_panel({{1.0625, 0.97, 1.0}, {1.001, 1.002, 1.0035}}, {"stock", "bond"}, dates);
  const auto path = (std::filesystem::temp_directory_path() / "md_panel.csv").string();
  save_panel_csv(panel, path);
  const auto loaded = load_panel_csv(path);
  CHECK(loaded.asset_names == panel.asset_names);
  CHECK(loaded.dates == panel.dates);
  CHECK(loaded.returns.data == panel.returns.data);
  CHECK(panel_checksum(loaded) == panel_checksum(panel));
}

TEST_CASE("return path CSV loader") {
  const auto path = write_temp("md_rp.csv", "period,stock,bond\n0,1.05,1.01\n1,0.98,1.01\n");
  std::vector<std::string> names;
  const auto rp = load_return_path_csv(path, &names);
  CHECK(names == std::vector<std::string>{"stock", "bond"});
  CHECK(rp.returns.rows == 2);
  CHECK(rp.returns.at(1, 0) == 0.98);
  const auto bad = write_temp("md_rp_bad.csv", "period,stock\n0,-1.0\n");
  CHECK_THROWS_AS(load_return_path_csv(bad), parse_error);
}

}  // TEST_SUITE
