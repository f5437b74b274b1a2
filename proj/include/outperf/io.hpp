#pragma once

#include <string>

#include "outperf/evaluate.hpp"
#include "outperf/market_data.hpp"

namespace outperf::io {

/// Shortest text form of a double that parses back to the identical bits.
std::string format_double(double value);

/// PathSet container: a little-endian binary block of doubles under `path`
/// plus a JSON sidecar at `path + ".json"` recording shape, asset names and
/// full provenance (mode, blocksize or model parameters, seed, source panel
/// checksum). Both files are byte-stable given identical inputs.
void save_pathset(const PathSet& paths, const std::string& path);
PathSet load_pathset(const std::string& path);

void write_cdf_csv(const std::vector<std::pair<double, double>>& points, const std::string& path);
void write_fan_csv(const evaluate::PercentileFan& fan, const std::string& path);
void write_heatmap_csv(const evaluate::HeatmapGrid& grid, const std::string& path);
void write_backtest_csv(const std::vector<evaluate::BacktestRecord>& records,
                        const std::vector<std::string>& asset_names, const std::string& path);

/// Side-by-side stats for both strategies plus the cross-strategy
/// probabilities, in the usual table layout (E, std, median, Pr below each
/// strategy's median).
void write_summary_json(const evaluate::WealthStats& adaptive,
                        const evaluate::WealthStats& benchmark,
                        const evaluate::CrossProbabilities& cross, std::size_t n_paths,
                        const std::string& path);

}  // namespace outperf::io
