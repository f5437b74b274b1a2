#pragma once

#include <cstdint>
#include <string>

#include "outperf/market_data.hpp"
#include "outperf/rng.hpp"

namespace outperf::kou {

/// Annualized parameters of the double-exponential jump-diffusion stock
/// model plus the constant risk-free rate driving the bond.
struct Params {
  double mu = 0.0;           // uncompensated drift, 1/year
  double sigma = 0.0;        // diffusive volatility, 1/sqrt(year)
  double lambda_jump = 0.0;  // jump intensity, events/year
  double p_up = 0.0;         // probability a jump is upward
  double eta1 = 2.0;         // upward jump-size exponent, > 1
  double eta2 = 1.0;         // downward jump-size exponent, > 0
  double r = 0.0;            // risk-free rate, 1/year

  void validate() const;
};

/// Calibrated defaults for the bundled preset (real stock index / T-bill).
Params default_params();

/// Reads a key=value file with keys mu, sigma, lambda, p_up, eta1, eta2, r.
Params load_params_file(const std::string& path);

/// E[log xi] = p_up/eta1 - (1 - p_up)/eta2.
double jump_log_mean(const Params& params);

/// E[xi] = p_up * eta1/(eta1 - 1) + (1 - p_up) * eta2/(eta2 + 1).
/// Both terms follow from integrating e^y against the double-exponential
/// density of y = log xi; the downward branch integral is eta2/(eta2 + 1).
double jump_mean(const Params& params);

/// One jump multiplier xi > 0: log xi is +Exp(eta1) with probability p_up,
/// otherwise -Exp(eta2).
double sample_jump(const Params& params, Rng& rng);

/// Gross stock return over dt years, sampled from the exact log-space
/// solution: exp((mu - lambda*(E[xi]-1) - sigma^2/2) dt + sigma sqrt(dt) Z)
/// times a Poisson(lambda dt) product of jump multipliers. No timestep bias.
double simulate_stock_period(const Params& params, double dt_years, Rng& rng);

/// Deterministic gross bond return exp(r * dt).
double bond_return(const Params& params, double dt_years);

/// L synthetic paths of shape (N x 2): column 0 stock, column 1 bond.
/// Per-path RNG streams make the result independent of worker count.
PathSet simulate_panel(const Params& params, std::size_t n_periods, double dt_years,
                       std::size_t n_paths, std::uint64_t seed, int workers = 1);

}  // namespace outperf::kou
