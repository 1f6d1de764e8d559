#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "elm/kernel.hpp"
#include "elm/linalg.hpp"
#include "elm/model.hpp"
#include "elm/spectral.hpp"

namespace elm {

enum class FlowUnits { Shares, Risk };

/// Uniformly sampled prices and signed flows. Column t holds the price at
/// the end of bin t and the average signed flow during bin t (shares/s, or
/// $ of risk/s when units == Risk).
struct MarketSeries {
  std::vector<std::string> instrument_ids;
  double dt = 300.0;
  Matrix prices;
  Matrix flows;
  FlowUnits units = FlowUnits::Shares;

  std::size_t n_assets() const { return static_cast<std::size_t>(prices.rows()); }
  std::size_t n_bins() const { return static_cast<std::size_t>(prices.cols()); }
  /// Throws InputError on mismatched shapes, non-finite values or dt <= 0.
  void validate() const;
};

/// Aggregates to coarser bins: last price and mean flow per coarse bin.
/// `bin_seconds` must be an integer multiple of series.dt; trailing partial
/// bins are dropped.
MarketSeries resample(const MarketSeries& series, double bin_seconds);

struct StandardizedSeries {
  Matrix x;  ///< p / sigma
  Matrix q;  ///< risk flows sigma * v
  double dt;
};

struct CovarianceEstimate {
  Matrix covariance;  ///< Sigma over the horizon, $^2
  Vector sigma;
  CorrelationMatrix rho;
  StandardizedSeries standardized;
  std::size_t n_windows;
};

/// Sigma = E[(p_{t+H} - p_t)(p_{t+H} - p_t)^T] averaged over every
/// horizon-length window, then sigma, rho and the standardized series.
/// Throws InputError with fewer than N + 1 non-overlapping horizons or a
/// zero-volatility instrument.
CovarianceEstimate estimate_covariance_and_standardize(const MarketSeries& series, std::size_t horizon_bins);

/// Lagged price-response and flow covariances of a standardized series.
struct CovariationSet {
  std::size_t max_lag = 0;
  double dt = 0.0;
  std::vector<Matrix> response;  ///< r(l) = E[xdot_t q_{t-l}^T], l = 0..L
  std::vector<Matrix> flow;      ///< c(k) = E[q_t q_{t-k}^T], k = -L..L at index k + L

  const Matrix& flow_at(long lag) const { return flow.at(static_cast<std::size_t>(lag + static_cast<long>(max_lag))); }
  std::size_t n_assets() const { return response.empty() ? 0 : static_cast<std::size_t>(response.front().rows()); }

  /// rbar(l) = N^-1 sum_i r^ii(l).
  Vector mean_response() const;
  /// cbar(k) = N^-1 sum_i c^ii(k) / c^ii(0) for k = -L..L (index k + L).
  /// Instruments with c^ii(0) = 0 are skipped; all zero if none remain.
  Vector normalized_flow_autocov() const;
};

/// xdot_t = (x_t - x_{t-1}) / dt paired with q at lag l. Throws InputError
/// unless max_lag < n_bins / 10.
CovariationSet compute_covariations(const StandardizedSeries& series, std::size_t max_lag);

struct KernelFit {
  double dt = 0.0;
  Vector increments;  ///< phi(l dt) - phi((l-1) dt), l = 0..L, first entry 1
  Vector derivative;  ///< increments / dt
  Vector table;       ///< phihat(l dt), phihat(0) = 1
  double amplitude = 0.0;         ///< unnormalized lag-0 increment
  double condition_number = 0.0;  ///< of the Toeplitz flow matrix
  double alpha = 0.0;
  double tau0 = 0.0;
  double fit_rms = 0.0;
  int fit_iterations = 0;

  DecayKernel kernel() const { return {alpha, tau0}; }
};

/// Solves rbar = A d with A[l][m] = cbar(l - m) by Tikhonov least squares
/// (weight ridge * sigma_max(A)^2), integrates d to phihat, normalizes
/// phihat(0) = 1 and fits the power-law decay.
KernelFit deconvolve_kernel(const CovariationSet& covariations, double ridge = 1e-6);

struct PowerLawFit {
  double alpha;
  double tau0;
  double rms;
  int iterations;
};

/// Weighted least squares fit of (1 + tau/tau0)^-alpha to a table sampled
/// at tau = l dt; weights 1/sqrt(l + 1). Grid seeded, then damped
/// Gauss-Newton.
PowerLawFit fit_power_law(const Vector& table, double dt);

enum class ModeStatus { Estimated, Negative, BelowFloor, ZeroDenominator };

std::string to_string(ModeStatus status);

struct ModeEstimate {
  std::size_t mode = 0;
  double eigenvalue = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double g = 0.0;
  ModeStatus status = ModeStatus::BelowFloor;
};

struct ModeLiquidityEstimate {
  std::vector<ModeEstimate> modes;
  Vector liquidities;  ///< per mode; zero where not estimated or excluded
};

/// g^a = (1/Lambda^a) [sum_l phidot(l) rtilde^a(l) dt] /
///       [sum_{l,l'} phidot(l) phidot(l') ctilde^a(l - l') dt^2]
/// with rtilde^a = pi^aT r pi^a. Modes absent from `portfolios` are reported
/// as BelowFloor. Negative estimates are reported; they enter `liquidities`
/// only when keep_negative is set.
ModeLiquidityEstimate estimate_mode_liquidities(const CovariationSet& covariations, const EigenStructure& eigen,
                                                const EigenPortfolios& portfolios, const Vector& kernel_derivative,
                                                bool keep_negative = false);

struct CalibrationConfig {
  std::size_t horizon_bins = 96;   ///< bins per daily covariance window
  std::size_t max_lag = 60;
  double eigen_floor = 1e-4;       ///< relative to the top eigenvalue
  double ridge = 1e-6;
  double bin_seconds = 0.0;        ///< 0 keeps the native sampling
  bool force_negative = false;
};

struct CalibrationReport {
  CalibrationConfig config;
  bool complete = false;
  std::string failed_step;  ///< empty, or one of the step names
  std::string failure_category;  ///< "input", "config" or "numerical"
  std::string failure_message;

  std::vector<std::string> instrument_ids;
  double dt = 0.0;
  std::optional<CovarianceEstimate> covariance;
  std::optional<CovariationSet> covariations;
  std::optional<KernelFit> kernel;
  std::optional<EigenStructure> raw_eigen;
  std::optional<EigenStructure> eigen;  ///< cleaned
  double eigen_floor = 0.0;
  std::vector<ModeEstimate> modes;
  Vector liquidities;

  /// Fitted model; throws NumericalError on an incomplete report.
  PropagatorModel model() const;
};

/// Box-2 steps in order: covariance, covariations, kernel, eigen, liquidities.
/// A failing step leaves a partial report naming it instead of throwing.
CalibrationReport run_box2_pipeline(const MarketSeries& series, const CalibrationConfig& config);

}  // namespace elm
