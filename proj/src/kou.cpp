#include "outperf/kou.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "parallel.hpp"

namespace outperf::kou {

void Params::validate() const {
  if (!(eta1 > 1.0)) throw parameter_error("kou: eta1 must be > 1 for E[xi] to be finite");
  if (!(eta2 > 0.0)) throw parameter_error("kou: eta2 must be > 0");
  if (!(lambda_jump >= 0.0)) throw parameter_error("kou: jump intensity must be >= 0");
  if (!(sigma >= 0.0)) throw parameter_error("kou: sigma must be >= 0");
  if (!(p_up >= 0.0 && p_up <= 1.0)) throw parameter_error("kou: p_up must lie in [0, 1]");
  if (!std::isfinite(mu) || !std::isfinite(r)) throw parameter_error("kou: mu and r must be finite");
}

Params default_params() {
  Params p;
  p.mu = 0.08889;
  p.sigma = 0.14771;
  p.lambda_jump = 0.32222;
  p.p_up = 0.27586;
  p.eta1 = 4.4273;
  p.eta2 = 5.2613;
  p.r = 0.00827;
  return p;
}

Params load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::map<std::string, double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw parse_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      values[key] = std::stod(value);
    } catch (const std::exception&) {
      throw parse_error(path + ":" + std::to_string(line_no) + ": bad value '" + value + "'");
    }
  }
  Params p;
  auto parts = {std::pair{"mu", &p.mu},     std::pair{"sigma", &p.sigma},
                std::pair{"lambda", &p.lambda_jump}, std::pair{"p_up", &p.p_up},
                std::pair{"eta1", &p.eta1}, std::pair{"eta2", &p.eta2},
                std::pair{"r", &p.r}};
  for (auto [key, field] : parts) {
    const auto it = values.find(key);
    if (it == values.end()) throw parse_error(path + ": missing key '" + std::string(key) + "'");
    *field = it->second;
  }
  p.validate();
  return p;
}

double jump_log_mean(const Params& params) {
  params.validate();
  return params.p_up / params.eta1 - (1.0 - params.p_up) / params.eta2;
}

double jump_mean(const Params& params) {
  params.validate();
  return params.p_up * params.eta1 / (params.eta1 - 1.0) +
         (1.0 - params.p_up) * params.eta2 / (params.eta2 + 1.0);
}

double sample_jump(const Params& params, Rng& rng) {
  const bool upward = rng.uniform01() < params.p_up;
  const double y = upward ? rng.exponential(params.eta1) : -rng.exponential(params.eta2);
  return std::exp(y);
}

double simulate_stock_period(const Params& params, double dt_years, Rng& rng) {
  params.validate();
  if (!(dt_years > 0.0)) throw parameter_error("simulate_stock_period: dt must be > 0");
  const double compensator = params.lambda_jump * (jump_mean(params) - 1.0);
  const double drift = (params.mu - compensator - 0.5 * params.sigma * params.sigma) * dt_years;
  double log_return = drift + params.sigma * std::sqrt(dt_years) * rng.normal();
  const std::uint64_t jumps = rng.poisson(params.lambda_jump * dt_years);
  for (std::uint64_t i = 0; i < jumps; ++i) log_return += std::log(sample_jump(params, rng));
  return std::exp(log_return);
}

double bond_return(const Params& params, double dt_years) {
  if (!(dt_years > 0.0)) throw parameter_error("bond_return: dt must be > 0");
  return std::exp(params.r * dt_years);
}

PathSet simulate_panel(const Params& params, std::size_t n_periods, double dt_years,
                       std::size_t n_paths, std::uint64_t seed, int workers) {
  params.validate();
  if (n_periods == 0 || n_paths == 0) throw parameter_error("simulate_panel: N and L must be >= 1");
  if (!(dt_years > 0.0)) throw parameter_error("simulate_panel: dt must be > 0");

  PathSet set;
  set.n_paths = n_paths;
  set.n_periods = n_periods;
  set.n_assets = 2;
  set.asset_names = {"stock", "bond"};
  set.data.resize(n_paths * n_periods * 2);
  set.provenance.kind = "synthetic";
  set.provenance.seed = seed;
  auto put = [&set](const char* key, double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    set.provenance.config[key] = ss.str();
  };
  put("mu", params.mu);
  put("sigma", params.sigma);
  put("lambda", params.lambda_jump);
  put("p_up", params.p_up);
  put("eta1", params.eta1);
  put("eta2", params.eta2);
  put("r", params.r);
  put("dt_years", dt_years);

  const double bond = bond_return(params, dt_years);
  detail::run_over_paths(n_paths, workers, [&](std::size_t l) {
    Rng rng = Rng::for_stream(seed, l);
    auto block = set.path_block(l);
    for (std::size_t n = 0; n < n_periods; ++n) {
      block[2 * n] = simulate_stock_period(params, dt_years, rng);
      block[2 * n + 1] = bond;
    }
  });
  return set;
}

}  // namespace outperf::kou
