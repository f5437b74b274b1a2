#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "outperf/matrix.hpp"

namespace outperf {

/// Calendar month stamp, the finest time resolution handled anywhere.
struct YearMonth {
  int year = 0;
  int month = 0;  // 1..12

  bool operator==(const YearMonth&) const = default;

  YearMonth next() const {
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
  }

  static YearMonth parse(const std::string& text);  // "YYYY-MM"
  std::string str() const;
};

/// Monthly total-return index: strictly consecutive months, positive levels.
struct IndexSeries {
  std::string name;
  std::vector<YearMonth> dates;
  std::vector<double> levels;

  void validate() const;  // throws parse_error / alignment_error
};

/// Aligned gross monthly returns for M assets. Row i holds the return over
/// the month ending at dates[i].
struct AssetPanel {
  std::vector<YearMonth> dates;
  Matrix returns;  // months x M, all entries > 0
  std::vector<std::string> asset_names;

  void validate() const;
};

/// One simulated or resampled sequence of per-period gross return vectors.
struct ReturnPath {
  Matrix returns;  // N x M, all entries > 0
};

/// Where a PathSet came from, sufficient to regenerate it.
struct Provenance {
  std::string kind;  // "bootstrap" | "synthetic" | "historical"
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
};

/// L return paths sharing one (N, M) shape, stored contiguously.
struct PathSet {
  std::size_t n_paths = 0;
  std::size_t n_periods = 0;
  std::size_t n_assets = 0;
  std::vector<double> data;  // n_paths * n_periods * n_assets, path-major
  std::vector<std::string> asset_names;
  Provenance provenance;

  double ret(std::size_t path, std::size_t period, std::size_t asset) const {
    return data[(path * n_periods + period) * n_assets + asset];
  }
  std::span<const double> period_returns(std::size_t path, std::size_t period) const {
    return {data.data() + (path * n_periods + period) * n_assets, n_assets};
  }
  std::span<double> path_block(std::size_t path) {
    return {data.data() + path * n_periods * n_assets, n_periods * n_assets};
  }
};

/// Parses the `date,<name>` CSV format. Errors name the offending line.
IndexSeries load_index_csv(const std::string& path);

/// Converts a nominal index into real terms by pointwise division with a
/// same-dated CPI series. Both series must share the exact date axis; levels
/// of the same month are divided directly (no averaging).
IndexSeries deflate(const IndexSeries& nominal, const IndexSeries& cpi);

/// Gross month-over-month returns, levels[i+1] / levels[i].
std::vector<double> to_returns(const IndexSeries& series);

/// Assembles M per-month return sequences into a validated panel. `dates`
/// stamps the month each return ends on.
AssetPanel build_panel(const std::vector<std::vector<double>>& series_list,
                       const std::vector<std::string>& names,
                       const std::vector<YearMonth>& dates);

/// Compounds consecutive groups of `months_per_period` monthly gross returns
/// into per-period returns. The row count must be an exact multiple.
ReturnPath compound_to_periods(const Matrix& monthly, std::size_t months_per_period);

/// compound_to_periods applied to every path in a set.
PathSet compound_paths(const PathSet& monthly, std::size_t months_per_period);

AssetPanel load_panel_csv(const std::string& path);
void save_panel_csv(const AssetPanel& panel, const std::string& path);

/// Reads a single return path (header `period,<name1>,...,<nameM>`, one row
/// per period with gross returns). Used for backtests on supplied paths.
ReturnPath load_return_path_csv(const std::string& path, std::vector<std::string>* names = nullptr);

/// FNV-1a over dates, return bits and asset names; identifies the resampling
/// source in PathSet sidecars.
std::uint64_t panel_checksum(const AssetPanel& panel);

}  // namespace outperf
