#include "outperf/market_data.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "outperf/io.hpp"

namespace outperf {

namespace {

std::string line_msg(const std::string& path, std::size_t line_no, const std::string& what) {
  return path + ":" + std::to_string(line_no) + ": " + what;
}

double parse_positive(const std::string& field, const std::string& path, std::size_t line_no,
                      const char* what) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw parse_error(line_msg(path, line_no, std::string("malformed ") + what + " '" + field + "'"));
  }
  if (!(value > 0.0)) {
    throw parse_error(line_msg(path, line_no, std::string("non-positive ") + what));
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

YearMonth YearMonth::parse(const std::string& text) {
  if (text.size() != 7 || text[4] != '-') throw parse_error("bad date '" + text + "', expected YYYY-MM");
  int y = 0, m = 0;
  auto r1 = std::from_chars(text.data(), text.data() + 4, y);
  auto r2 = std::from_chars(text.data() + 5, text.data() + 7, m);
  if (r1.ec != std::errc{} || r2.ec != std::errc{} || m < 1 || m > 12) {
    throw parse_error("bad date '" + text + "', expected YYYY-MM");
  }
  return {y, m};
}

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

void IndexSeries::validate() const {
  if (dates.size() != levels.size()) throw alignment_error("index series: dates/levels length mismatch");
  if (dates.size() < 2) throw parse_error("index series '" + name + "': need at least 2 rows");
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (!(levels[i] > 0.0)) throw parse_error("index series '" + name + "': non-positive index level");
    if (i > 0 && !(dates[i] == dates[i - 1].next())) {
      throw parse_error("index series '" + name + "': calendar gap or duplicate month at " + dates[i].str());
    }
  }
}

void AssetPanel::validate() const {
  if (returns.rows != dates.size()) throw alignment_error("panel: date axis does not match return rows");
  if (returns.cols != asset_names.size()) throw shape_error("panel: asset names do not match columns");
  if (returns.rows == 0 || returns.cols == 0) throw shape_error("panel: empty");
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i] == dates[i - 1].next())) {
      throw parse_error("panel: calendar gap or duplicate month at " + dates[i].str());
    }
  }
  for (double v : returns.data) {
    if (!(v > 0.0)) throw parse_error("panel: non-positive gross return");
  }
}

IndexSeries load_index_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  IndexSeries series;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw parse_error(path + ": empty file");
  ++line_no;
  const auto header = split_csv(strip_cr(line));
  if (header.size() != 2 || header[0] != "date") {
    throw parse_error(line_msg(path, line_no, "expected header 'date,<name>'"));
  }
  series.name = header[1];

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw parse_error(line_msg(path, line_no, "expected 2 fields"));
    YearMonth ym;
    try {
      ym = YearMonth::parse(fields[0]);
    } catch (const parse_error& e) {
      throw parse_error(line_msg(path, line_no, e.what()));
    }
    if (!series.dates.empty()) {
      if (ym == series.dates.back()) throw parse_error(line_msg(path, line_no, "duplicate month " + ym.str()));
      if (!(ym == series.dates.back().next())) {
        throw parse_error(line_msg(path, line_no, "calendar gap between " + series.dates.back().str() + " and " + ym.str()));
      }
    }
    series.dates.push_back(ym);
    series.levels.push_back(parse_positive(fields[1], path, line_no, "index level"));
  }
  series.validate();
  return series;
}

IndexSeries deflate(const IndexSeries& nominal, const IndexSeries& cpi) {
  if (nominal.dates != cpi.dates) {
    throw alignment_error("deflate: '" + nominal.name + "' and '" + cpi.name + "' have different date axes");
  }
  IndexSeries real;
  real.name = nominal.name;
  real.dates = nominal.dates;
  real.levels.resize(nominal.levels.size());
  for (std::size_t i = 0; i < real.levels.size(); ++i) {
    real.levels[i] = nominal.levels[i] / cpi.levels[i];
  }
  real.validate();
  return real;
}

std::vector<double> to_returns(const IndexSeries& series) {
  series.validate();
  std::vector<double> out(series.levels.size() - 1);
  for (std::size_t i = 0; i + 1 < series.levels.size(); ++i) {
    out[i] = series.levels[i + 1] / series.levels[i];
  }
  return out;
}

AssetPanel build_panel(const std::vector<std::vector<double>>& series_list,
                       const std::vector<std::string>& names,
                       const std::vector<YearMonth>& dates) {
  if (series_list.empty()) throw shape_error("build_panel: no series");
  if (series_list.size() != names.size()) throw alignment_error("build_panel: names/series count mismatch");
  const std::size_t months = series_list.front().size();
  for (const auto& s : series_list) {
    if (s.size() != months) throw alignment_error("build_panel: series length mismatch");
  }
  if (dates.size() != months) throw alignment_error("build_panel: date axis length mismatch");

  AssetPanel panel;
  panel.dates = dates;
  panel.asset_names = names;
  panel.returns = Matrix(months, series_list.size());
  for (std::size_t m = 0; m < series_list.size(); ++m) {
    for (std::size_t i = 0; i < months; ++i) panel.returns.at(i, m) = series_list[m][i];
  }
  panel.validate();
  return panel;
}

ReturnPath compound_to_periods(const Matrix& monthly, std::size_t months_per_period) {
  if (months_per_period == 0) throw parameter_error("compound_to_periods: months_per_period must be >= 1");
  if (monthly.rows % months_per_period != 0) {
    throw parameter_error("compound_to_periods: incomplete final period (" + std::to_string(monthly.rows) +
                          " rows, " + std::to_string(months_per_period) + " months per period)");
  }
  ReturnPath path;
  path.returns = Matrix(monthly.rows / months_per_period, monthly.cols, 1.0);
  for (std::size_t i = 0; i < monthly.rows; ++i) {
    const std::size_t period = i / months_per_period;
    for (std::size_t m = 0; m < monthly.cols; ++m) {
      path.returns.at(period, m) *= monthly.at(i, m);
    }
  }
  return path;
}

PathSet compound_paths(const PathSet& monthly, std::size_t months_per_period) {
  if (months_per_period == 0) throw parameter_error("compound_paths: months_per_period must be >= 1");
  if (monthly.n_periods % months_per_period != 0) {
    throw parameter_error("compound_paths: incomplete final period");
  }
  PathSet out;
  out.n_paths = monthly.n_paths;
  out.n_periods = monthly.n_periods / months_per_period;
  out.n_assets = monthly.n_assets;
  out.asset_names = monthly.asset_names;
  out.provenance = monthly.provenance;
  out.provenance.config["months_per_period"] = std::to_string(months_per_period);
  out.data.assign(out.n_paths * out.n_periods * out.n_assets, 1.0);
  for (std::size_t l = 0; l < monthly.n_paths; ++l) {
    for (std::size_t i = 0; i < monthly.n_periods; ++i) {
      const std::size_t period = i / months_per_period;
      for (std::size_t m = 0; m < monthly.n_assets; ++m) {
        out.data[(l * out.n_periods + period) * out.n_assets + m] *= monthly.ret(l, i, m);
      }
    }
  }
  return out;
}

AssetPanel load_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw parse_error(path + ": empty file");
  ++line_no;
  auto header = split_csv(strip_cr(line));
  if (header.size() < 2 || header[0] != "date") {
    throw parse_error(line_msg(path, line_no, "expected header 'date,<name1>,...'"));
  }
  AssetPanel panel;
  panel.asset_names.assign(header.begin() + 1, header.end());
  std::vector<double> values;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw parse_error(line_msg(path, line_no, "expected " + std::to_string(header.size()) + " fields"));
    }
    try {
      panel.dates.push_back(YearMonth::parse(fields[0]));
    } catch (const parse_error& e) {
      throw parse_error(line_msg(path, line_no, e.what()));
    }
    for (std::size_t m = 1; m < fields.size(); ++m) {
      values.push_back(parse_positive(fields[m], path, line_no, "gross return"));
    }
  }
  panel.returns = Matrix(panel.dates.size(), panel.asset_names.size());
  panel.returns.data = std::move(values);
  panel.validate();
  return panel;
}

void save_panel_csv(const AssetPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "date";
  for (const auto& name : panel.asset_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < panel.returns.rows; ++i) {
    out << panel.dates[i].str();
    for (std::size_t m = 0; m < panel.returns.cols; ++m) {
      out << ',' << io::format_double(panel.returns.at(i, m));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

ReturnPath load_return_path_csv(const std::string& path, std::vector<std::string>* names) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw parse_error(path + ": empty file");
  ++line_no;
  const auto header = split_csv(strip_cr(line));
  if (header.size() < 2 || header[0] != "period") {
    throw parse_error(line_msg(path, line_no, "expected header 'period,<name1>,...'"));
  }
  if (names) names->assign(header.begin() + 1, header.end());

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw parse_error(line_msg(path, line_no, "expected " + std::to_string(header.size()) + " fields"));
    }
    for (std::size_t m = 1; m < fields.size(); ++m) {
      values.push_back(parse_positive(fields[m], path, line_no, "gross return"));
    }
    ++rows;
  }
  if (rows == 0) throw parse_error(path + ": no data rows");
  ReturnPath rp;
  rp.returns = Matrix(rows, header.size() - 1);
  rp.returns.data = std::move(values);
  return rp;
}

std::uint64_t panel_checksum(const AssetPanel& panel) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a 64
  auto mix = [&h](const void* bytes, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& d : panel.dates) {
    const std::int32_t packed = d.year * 100 + d.month;
    mix(&packed, sizeof packed);
  }
  for (double v : panel.returns.data) mix(&v, sizeof v);
  for (const auto& name : panel.asset_names) mix(name.data(), name.size());
  return h;
}

}  // namespace outperf
