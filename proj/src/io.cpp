#include "outperf/io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

static_assert(std::endian::native == std::endian::little,
              "pathset container assumes a little-endian host");

namespace outperf::io {

using nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == value || (value != value && parsed != parsed)) break;
  }
  return buf;
}

namespace {

constexpr char kMagic[8] = {'O', 'P', 'F', 'P', 'A', 'T', 'H', 'S'};
constexpr std::uint32_t kVersion = 1;

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n, const std::string& path) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw parse_error(path + ": truncated pathset container");
  }
}

}  // namespace

void save_pathset(const PathSet& paths, const std::string& path) {
  if (paths.n_paths == 0 || paths.n_periods == 0 || paths.n_assets == 0) {
    throw shape_error("save_pathset: empty path set");
  }
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    write_bytes(out, kMagic, sizeof kMagic);
    write_bytes(out, &kVersion, sizeof kVersion);
    const std::uint64_t dims[3] = {paths.n_paths, paths.n_periods, paths.n_assets};
    write_bytes(out, dims, sizeof dims);
    write_bytes(out, paths.data.data(), paths.data.size() * sizeof(double));
    if (!out) throw io_error("write failed for '" + path + "'");
  }
  ordered_json sidecar;
  sidecar["format"] = "outperf-pathset";
  sidecar["version"] = kVersion;
  sidecar["n_paths"] = paths.n_paths;
  sidecar["n_periods"] = paths.n_periods;
  sidecar["n_assets"] = paths.n_assets;
  sidecar["asset_names"] = paths.asset_names;
  ordered_json prov;
  prov["kind"] = paths.provenance.kind;
  prov["seed"] = paths.provenance.seed;
  for (const auto& [key, value] : paths.provenance.config) prov[key] = value;
  sidecar["provenance"] = prov;

  std::ofstream side(path + ".json");
  if (!side) throw io_error("cannot write '" + path + ".json'");
  side << sidecar.dump(2) << '\n';
  if (!side) throw io_error("write failed for '" + path + ".json'");
}

PathSet load_pathset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  char magic[8];
  read_bytes(in, magic, sizeof magic, path);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw parse_error(path + ": not an outperf pathset container");
  }
  std::uint32_t version = 0;
  read_bytes(in, &version, sizeof version, path);
  if (version != kVersion) throw parse_error(path + ": unsupported container version");
  std::uint64_t dims[3];
  read_bytes(in, dims, sizeof dims, path);

  PathSet paths;
  paths.n_paths = dims[0];
  paths.n_periods = dims[1];
  paths.n_assets = dims[2];
  const std::uint64_t cells = dims[0] * dims[1] * dims[2];
  if (cells == 0 || cells > (1ULL << 34)) throw parse_error(path + ": implausible dimensions");
  paths.data.resize(cells);
  read_bytes(in, paths.data.data(), cells * sizeof(double), path);

  std::ifstream side(path + ".json");
  if (!side) throw io_error("cannot open sidecar '" + path + ".json'");
  nlohmann::json sidecar;
  try {
    side >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(path + ".json: " + e.what());
  }
  if (sidecar.value("format", "") != "outperf-pathset") {
    throw parse_error(path + ".json: not an outperf pathset sidecar");
  }
  if (sidecar.value("n_paths", std::uint64_t{0}) != paths.n_paths ||
      sidecar.value("n_periods", std::uint64_t{0}) != paths.n_periods ||
      sidecar.value("n_assets", std::uint64_t{0}) != paths.n_assets) {
    throw parse_error(path + ".json: sidecar shape disagrees with container");
  }
  paths.asset_names = sidecar.value("asset_names", std::vector<std::string>{});
  if (paths.asset_names.size() != paths.n_assets) {
    throw parse_error(path + ".json: asset name count mismatch");
  }
  if (sidecar.contains("provenance")) {
    const auto& prov = sidecar["provenance"];
    paths.provenance.kind = prov.value("kind", "");
    paths.provenance.seed = prov.value("seed", std::uint64_t{0});
    for (const auto& [key, value] : prov.items()) {
      if (key == "kind" || key == "seed") continue;
      paths.provenance.config[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  for (double v : paths.data) {
    if (!(v > 0.0)) throw parse_error(path + ": non-positive gross return in container");
  }
  return paths;
}

void write_cdf_csv(const std::vector<std::pair<double, double>>& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "value,cdf\n";
  for (const auto& [value, cdf] : points) {
    out << format_double(value) << ',' << format_double(cdf) << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

void write_fan_csv(const evaluate::PercentileFan& fan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "time_years";
  for (double level : fan.levels) out << ",p" << format_double(level);
  out << ",mean\n";
  for (std::size_t t = 0; t < fan.times.size(); ++t) {
    out << format_double(fan.times[t]);
    for (std::size_t q = 0; q < fan.levels.size(); ++q) {
      out << ',' << format_double(fan.values.at(t, q));
    }
    out << ',' << format_double(fan.mean[t]) << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

void write_heatmap_csv(const evaluate::HeatmapGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "time_lo,time_hi,diff_lo,diff_hi,count,mean_stock_allocation\n";
  const std::size_t diff_bins = grid.diff_edges.size() - 1;
  for (std::size_t tb = 0; tb + 1 < grid.time_edges.size(); ++tb) {
    for (std::size_t db = 0; db < diff_bins; ++db) {
      const std::size_t count = grid.counts[tb * diff_bins + db];
      out << format_double(grid.time_edges[tb]) << ',' << format_double(grid.time_edges[tb + 1])
          << ',' << format_double(grid.diff_edges[db]) << ','
          << format_double(grid.diff_edges[db + 1]) << ',' << count << ',';
      if (count > 0) out << format_double(grid.mean_allocation.at(tb, db));
      out << '\n';  // empty mean marks a cell with no observations
    }
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

void write_backtest_csv(const std::vector<evaluate::BacktestRecord>& records,
                        const std::vector<std::string>& asset_names, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "period,time_years,wealth,benchmark_wealth";
  for (const auto& name : asset_names) out << ",alloc_" << name;
  out << '\n';
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& rec = records[n];
    out << n << ',' << format_double(rec.time_years) << ',' << format_double(rec.wealth) << ','
        << format_double(rec.benchmark_wealth);
    for (std::size_t m = 0; m < asset_names.size(); ++m) {
      out << ',';
      if (m < rec.allocation.size()) out << format_double(rec.allocation[m]);
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

void write_summary_json(const evaluate::WealthStats& adaptive,
                        const evaluate::WealthStats& benchmark,
                        const evaluate::CrossProbabilities& cross, std::size_t n_paths,
                        const std::string& path) {
  auto stats_to_json = [](const evaluate::WealthStats& stats) {
    ordered_json j;
    j["mean"] = stats.mean;
    j["std"] = stats.stddev;
    j["median"] = stats.median;
    ordered_json var;
    for (const auto& [level, value] : stats.var_at_level) var[format_double(level)] = value;
    j["var"] = var;
    ordered_json below;
    for (const auto& [threshold, prob] : stats.prob_below) below[format_double(threshold)] = prob;
    j["prob_below"] = below;
    return j;
  };
  ordered_json summary;
  summary["n_paths"] = n_paths;
  summary["columns"] = {"mean", "std", "median", "prob_below_benchmark_median",
                        "prob_below_adaptive_median"};
  ordered_json strategies;
  strategies["adaptive"] = stats_to_json(adaptive);
  strategies["benchmark"] = stats_to_json(benchmark);
  summary["strategies"] = strategies;
  ordered_json cross_json;
  cross_json["adaptive_below_benchmark_median"] = cross.adaptive_below_benchmark_median;
  cross_json["benchmark_below_adaptive_median"] = cross.benchmark_below_adaptive_median;
  cross_json["adaptive_below_benchmark_pathwise"] = cross.adaptive_below_pathwise;
  summary["cross"] = cross_json;

  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << summary.dump(2) << '\n';
  if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace outperf::io
