#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "elm/calibration.hpp"
#include "elm/linalg.hpp"
#include "elm/model.hpp"
#include "elm/random.hpp"
#include "elm/spectral.hpp"

namespace elm {

/// Exogenous trade of `risk` dollars of risk executed within one bin.
struct Impulse {
  std::size_t asset = 0;
  std::size_t bin = 0;
  double risk = 0.0;
};

struct WorldConfig {
  PropagatorModel model;
  Vector flow_scale;               ///< relative per-asset flow scale; empty means all ones
  double flow_persistence = 0.8;   ///< AR(1) coefficient per bin
  double noise_share = 0.9;        ///< share of daily variance not explained by impact
  std::size_t n_days = 250;
  std::size_t bins_per_day = 96;
  double bin_seconds = 300.0;
  std::size_t memory_bins = 480;   ///< impact response truncated after this lag
  std::uint64_t seed = 42;
  double price_level = 100.0;
  std::vector<Impulse> impulses;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct SyntheticMarket {
  MarketSeries series;
  Matrix risk_flows;         ///< q in $ of risk per second, N x T
  Vector flow_sd;            ///< stationary sd of each asset's risk flow
  Matrix impact_covariance;  ///< daily covariance of the impact-driven price change
  Matrix noise_covariance;   ///< daily covariance of the noise
};

/// Standardized prices follow
///   x_t - x_{t-1} = dt sum_{m=0}^{memory} [phi(m dt) - phi((m-1) dt)] G q_{t-m} + noise_t
/// with AR(1) Gaussian flows independent across assets and a correlated
/// Gaussian random walk noise whose daily covariance is rho minus the
/// impact covariance. Throws ConfigError when that difference is not PSD.
SyntheticMarket simulate_world(const WorldConfig& config);

MarketSeries generate_market(const WorldConfig& config);

/// Daily covariance of impact-driven price changes per unit flow variance:
/// kappa * G diag(scale^2) G.
Matrix impact_daily_covariance(const WorldConfig& config, const Vector& flow_sd);

struct BiasedOrderConfig {
  double beta = 0.0;
  double participation = 0.05;
  Vector market_volumes;  ///< Q_M^i, $ of risk per day
  std::uint64_t seed = 42;
};

/// Q^i = eps^i * participation * Q_M^i, P(eps^i = +1) = (1 + beta) / 2.
Vector sample_biased_orders(const BiasedOrderConfig& config);
Vector sample_biased_orders(double beta, double participation, const Vector& market_volumes, Rng& rng);

/// (phi^2 ||psi*||^2 / 2) [(1 - beta^2) sum_i G^ii (Q_M^i)^2 + beta^2 Q_M^T G Q_M].
double expected_bias_cost(double beta, const Matrix& impact, const Vector& market_volumes, double participation,
                          double profile_norm);
double expected_bias_cost(double beta, const PropagatorModel& model, const Vector& market_volumes,
                          double participation, double profile_norm);

/// phi^2 [(1 - beta^2) sum_i rho^ii (Q_M^i)^2 + beta^2 Q_M^T rho Q_M].
double expected_bias_risk_squared(double beta, const Matrix& rho, const Vector& market_volumes, double participation);

struct BiasSweepConfig {
  std::vector<double> betas{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> participations{0.01, 0.05, 0.10};
  std::size_t mc_draws = 10000;
  std::uint64_t seed = 42;
  double daily_vol_fraction = 0.02;  ///< sigma / price, converts risk to notional
};

struct BiasSweepRow {
  double beta;
  double participation;
  double expected_cost;      ///< $
  double expected_cost_bps;  ///< per unit notional, x 1e4
  double mc_mean;
  double mc_stderr;
  double expected_risk;      ///< sqrt(E[R^2])
  double cost_per_risk;
};

struct BiasSweep {
  std::vector<BiasSweepRow> rows;
  /// E[C](beta = +-1) / E[C](beta = 0) = Q_M^T G Q_M / sum_i G^ii (Q_M^i)^2.
  double directional_ratio;
  /// g^1 Lambda^1 / (N^-1 sum_a g^a Lambda^a).
  double top_mode_ratio;
};

/// Synchronous optimal execution with kernel norm `profile_norm`; Monte-Carlo
/// columns use `mc_draws` orders per (beta, participation) from substreams of
/// `seed`.
BiasSweep bias_cost_ratio_report(const PropagatorModel& model, const Vector& market_volumes,
                                 const BiasSweepConfig& config, double profile_norm);

/// N eigenvalues summing to N: a top mode at `top_ratio` times the mean and a
/// Marchenko-Pastur bulk (aspect ratio `bulk_ratio` in (0, 1]) at evenly
/// spaced quantiles. Sorted descending.
Vector paper_like_spectrum(std::size_t n, double top_ratio, double bulk_ratio = 0.5);

/// Random correlation matrix with approximately the given spectrum: random
/// orthogonal eigenvectors (the first one uniform when market_mode is set),
/// then renormalized to unit diagonal.
CorrelationMatrix random_correlation(const Vector& spectrum, Rng& rng, bool market_mode = true);

/// Ground truth for synthetic worlds: paper-like spectrum, random
/// eigenvectors with a market mode, g^a proportional to Lambda^-1/2 with the
/// top mode at `top_liquidity` dollars, unit volatilities.
PropagatorModel synthetic_model(std::size_t n, std::uint64_t seed, const DecayKernel& kernel,
                                double top_liquidity = 30e6);

/// Log-normal cross-section of daily traded risk.
Vector lognormal_market_volumes(std::size_t n, double median, double log_sd, Rng& rng);

}  // namespace elm
