#include "elm/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "elm/error.hpp"

namespace elm {

void MarketSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("series sampling interval must be positive");
  if (prices.rows() == 0 || prices.cols() == 0) throw InputError("series is empty");
  if (flows.rows() != prices.rows() || flows.cols() != prices.cols())
    throw InputError("price and flow series have different shapes");
  if (instrument_ids.size() != n_assets()) throw InputError("instrument id count does not match series");
  if (!prices.allFinite() || !flows.allFinite()) throw InputError("series contains non-finite values");
}

MarketSeries resample(const MarketSeries& series, double bin_seconds) {
  series.validate();
  const double ratio = bin_seconds / series.dt;
  const auto factor = static_cast<Eigen::Index>(std::llround(ratio));
  if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9 * ratio)
    throw ConfigError("bin size must be an integer multiple of the sampling interval");
  if (factor == 1) return series;
  const Eigen::Index n_out = series.prices.cols() / factor;
  MarketSeries out{series.instrument_ids, bin_seconds, Matrix(series.prices.rows(), n_out),
                   Matrix(series.prices.rows(), n_out), series.units};
  for (Eigen::Index b = 0; b < n_out; ++b) {
    out.prices.col(b) = series.prices.col((b + 1) * factor - 1);
    out.flows.col(b) = series.flows.middleCols(b * factor, factor).rowwise().mean();
  }
  return out;
}

CovarianceEstimate estimate_covariance_and_standardize(const MarketSeries& series, std::size_t horizon_bins) {
  series.validate();
  const auto n = static_cast<Eigen::Index>(series.n_assets());
  const auto t = static_cast<Eigen::Index>(series.n_bins());
  const auto h = static_cast<Eigen::Index>(horizon_bins);
  if (h < 1) throw ConfigError("covariance horizon must be at least one bin");
  if (t / h < n + 1)
    throw InputError("need at least N + 1 = " + std::to_string(n + 1) + " horizons of data, have " +
                     std::to_string(t / h));

  const Eigen::Index windows = t - h;
  const Matrix diffs = series.prices.rightCols(windows) - series.prices.leftCols(windows);
  Matrix cov = (diffs * diffs.transpose()) / static_cast<double>(windows);
  cov = 0.5 * (cov + cov.transpose());

  Vector sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(cov(i, i) > 0.0)) throw InputError("instrument '" + series.instrument_ids[static_cast<std::size_t>(i)] +
                                             "' has zero volatility");
    sigma(i) = std::sqrt(cov(i, i));
  }
  CorrelationMatrix rho = CorrelationMatrix::from_covariance(cov);

  StandardizedSeries standardized{sigma.cwiseInverse().asDiagonal() * series.prices, Matrix(), series.dt};
  if (series.units == FlowUnits::Shares)
    standardized.q = sigma.asDiagonal() * series.flows;
  else
    standardized.q = series.flows;

  return {std::move(cov), std::move(sigma), std::move(rho), std::move(standardized),
          static_cast<std::size_t>(windows)};
}

Vector CovariationSet::mean_response() const {
  Vector out(static_cast<Eigen::Index>(response.size()));
  for (std::size_t l = 0; l < response.size(); ++l)
    out(static_cast<Eigen::Index>(l)) = response[l].trace() / static_cast<double>(response[l].rows());
  return out;
}

Vector CovariationSet::normalized_flow_autocov() const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(flow.size()));
  const Matrix& c0 = flow_at(0);
  std::size_t used = 0;
  for (Eigen::Index i = 0; i < c0.rows(); ++i) {
    if (!(c0(i, i) > 0.0)) continue;
    ++used;
    for (std::size_t k = 0; k < flow.size(); ++k) out(static_cast<Eigen::Index>(k)) += flow[k](i, i) / c0(i, i);
  }
  if (used > 0) out /= static_cast<double>(used);
  return out;
}

CovariationSet compute_covariations(const StandardizedSeries& series, std::size_t max_lag) {
  const Eigen::Index n_bins = series.x.cols();
  const auto lag_max = static_cast<Eigen::Index>(max_lag);
  if (series.q.rows() != series.x.rows() || series.q.cols() != n_bins)
    throw InputError("standardized prices and flows have different shapes");
  if (lag_max * 10 >= n_bins)
    throw InputError("series of " + std::to_string(n_bins) + " bins too short for max lag " + std::to_string(max_lag));

  CovariationSet out;
  out.max_lag = max_lag;
  out.dt = series.dt;

  // Returns over bin t (t = 1..T-1), aligned with flows q_t.
  const Eigen::Index n_ret = n_bins - 1;
  const Matrix xdot = (series.x.rightCols(n_ret) - series.x.leftCols(n_ret)) / series.dt;
  const auto flows_aligned = series.q.rightCols(n_ret);

  out.response.reserve(max_lag + 1);
  for (Eigen::Index l = 0; l <= lag_max; ++l) {
    const Eigen::Index count = n_ret - l;
    out.response.push_back(xdot.rightCols(count) * flows_aligned.leftCols(count).transpose() /
                           static_cast<double>(count));
  }

  std::vector<Matrix> positive;
  positive.reserve(max_lag + 1);
  for (Eigen::Index k = 0; k <= lag_max; ++k) {
    const Eigen::Index count = n_bins - k;
    positive.push_back(series.q.rightCols(count) * series.q.leftCols(count).transpose() /
                       static_cast<double>(count));
  }
  positive[0] = 0.5 * (positive[0] + positive[0].transpose());
  out.flow.resize(2 * max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    out.flow[max_lag + k] = positive[k];
    out.flow[max_lag - k] = positive[k].transpose();
  }
  return out;
}

namespace {

double power_law_sse(const Vector& table, double dt, double alpha, double tau0, Vector* residual = nullptr) {
  double sse = 0.0;
  if (residual) residual->resize(table.size());
  for (Eigen::Index l = 0; l < table.size(); ++l) {
    const double tau = static_cast<double>(l) * dt;
    const double w = 1.0 / std::sqrt(static_cast<double>(l) + 1.0);
    const double r = w * (std::pow(1.0 + tau / tau0, -alpha) - table(l));
    if (residual) (*residual)(l) = r;
    sse += r * r;
  }
  return sse;
}

}  // namespace

PowerLawFit fit_power_law(const Vector& table, double dt) {
  if (table.size() < 3) throw InputError("kernel table needs at least 3 lags for a power-law fit");
  if (!table.allFinite()) throw NumericalError("kernel table has non-finite entries");

  const double tau_min = 1e-3 * dt;
  const double tau_max = 1e3 * dt * static_cast<double>(table.size());
  double best_alpha = 0.2, best_tau0 = dt, best_sse = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia < 40; ++ia) {
    const double alpha = 0.02 * std::pow(1.15, ia);
    for (int it = 0; it < 50; ++it) {
      const double tau0 = tau_min * std::pow(tau_max / tau_min, it / 49.0);
      const double sse = power_law_sse(table, dt, alpha, tau0);
      if (sse < best_sse) {
        best_sse = sse;
        best_alpha = alpha;
        best_tau0 = tau0;
      }
    }
  }

  // Levenberg-Marquardt on (alpha, log tau0).
  double alpha = best_alpha;
  double log_tau0 = std::log(best_tau0);
  double lambda = 1e-3;
  double sse = best_sse;
  int iter = 0;
  Vector residual;
  for (; iter < 200; ++iter) {
    const double tau0 = std::exp(log_tau0);
    power_law_sse(table, dt, alpha, tau0, &residual);
    Eigen::Matrix<double, Eigen::Dynamic, 2> jac(table.size(), 2);
    for (Eigen::Index l = 0; l < table.size(); ++l) {
      const double tau = static_cast<double>(l) * dt;
      const double w = 1.0 / std::sqrt(static_cast<double>(l) + 1.0);
      const double u = 1.0 + tau / tau0;
      const double f = std::pow(u, -alpha);
      jac(l, 0) = -w * std::log(u) * f;
      jac(l, 1) = w * alpha * (tau / tau0) / u * f;
    }
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d grad = jac.transpose() * residual;
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      Eigen::Matrix2d damped = jtj;
      damped.diagonal() *= (1.0 + lambda);
      damped.diagonal().array() += 1e-300;
      const Eigen::Vector2d step = -damped.ldlt().solve(grad);
      const double a_new = std::clamp(alpha + step(0), 1e-6, 50.0);
      const double lt_new = std::clamp(log_tau0 + step(1), std::log(tau_min), std::log(tau_max));
      const double sse_new = power_law_sse(table, dt, a_new, std::exp(lt_new));
      if (sse_new < sse) {
        const double rel = (sse - sse_new) / std::max(sse, 1e-300);
        alpha = a_new;
        log_tau0 = lt_new;
        sse = sse_new;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (rel < 1e-14) iter = 1000;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  return {alpha, std::exp(log_tau0), std::sqrt(sse / static_cast<double>(table.size())), std::min(iter, 200)};
}

KernelFit deconvolve_kernel(const CovariationSet& covariations, double ridge) {
  if (!(ridge >= 0.0)) throw ConfigError("deconvolution ridge must be non-negative");
  const auto lags = static_cast<Eigen::Index>(covariations.max_lag) + 1;
  const Vector rbar = covariations.mean_response();
  const Vector cbar = covariations.normalized_flow_autocov();
  if (cbar.cwiseAbs().maxCoeff() == 0.0) throw NumericalError("flow autocovariance is identically zero");

  const auto offset = static_cast<Eigen::Index>(covariations.max_lag);
  Matrix toeplitz(lags, lags);
  for (Eigen::Index l = 0; l < lags; ++l)
    for (Eigen::Index m = 0; m < lags; ++m) toeplitz(l, m) = cbar(l - m + offset);

  Eigen::JacobiSVD<Matrix> svd(toeplitz);
  const Vector& sv = svd.singularValues();
  const double s_max = sv(0);
  const double s_min = sv(sv.size() - 1);
  KernelFit fit;
  fit.dt = covariations.dt;
  fit.condition_number = s_min > 0.0 ? s_max / s_min : std::numeric_limits<double>::infinity();

  const double weight = ridge * s_max * s_max;
  Matrix normal = toeplitz.transpose() * toeplitz;
  normal.diagonal().array() += weight;
  const double reg_cond = (s_max * s_max + weight) / (s_min * s_min + weight);
  if (!std::isfinite(reg_cond) || reg_cond > 1e14)
    throw NumericalError("deconvolution system ill-conditioned (condition number " +
                         std::to_string(fit.condition_number) + "); increase the ridge");
  const Vector increments = normal.ldlt().solve(toeplitz.transpose() * rbar);

  fit.amplitude = increments(0);
  if (!(fit.amplitude > 0.0))
    throw NumericalError("lag-0 price response is not positive; cannot normalize the kernel");
  fit.increments = increments / fit.amplitude;
  fit.derivative = fit.increments / fit.dt;
  fit.table.resize(lags);
  double acc = 0.0;
  for (Eigen::Index l = 0; l < lags; ++l) {
    acc += fit.increments(l);
    fit.table(l) = acc;
  }
  fit.table(0) = 1.0;

  const PowerLawFit pl = fit_power_law(fit.table, fit.dt);
  fit.alpha = pl.alpha;
  fit.tau0 = pl.tau0;
  fit.fit_rms = pl.rms;
  fit.fit_iterations = pl.iterations;
  return fit;
}

std::string to_string(ModeStatus status) {
  switch (status) {
    case ModeStatus::Estimated: return "estimated";
    case ModeStatus::Negative: return "negative";
    case ModeStatus::BelowFloor: return "below_floor";
    case ModeStatus::ZeroDenominator: return "zero_denominator";
  }
  return "unknown";
}

ModeLiquidityEstimate estimate_mode_liquidities(const CovariationSet& covariations, const EigenStructure& eigen,
                                                const EigenPortfolios& portfolios, const Vector& kernel_derivative,
                                                bool keep_negative) {
  const auto lags = static_cast<Eigen::Index>(covariations.max_lag) + 1;
  if (kernel_derivative.size() != lags) throw InputError("kernel derivative table length does not match lag window");
  if (eigen.size() != covariations.n_assets()) throw InputError("eigenstructure and covariations sizes differ");
  const double dt = covariations.dt;

  ModeLiquidityEstimate out;
  out.liquidities = Vector::Zero(static_cast<Eigen::Index>(eigen.size()));
  for (std::size_t a = 0; a < eigen.size(); ++a) {
    ModeEstimate est;
    est.mode = a;
    est.eigenvalue = eigen.values(static_cast<Eigen::Index>(a));
    out.modes.push_back(est);
  }

  for (std::size_t k = 0; k < portfolios.modes.size(); ++k) {
    const std::size_t a = portfolios.modes[k];
    const Vector pi = portfolios.weights.col(static_cast<Eigen::Index>(k));
    ModeEstimate& est = out.modes[a];

    Vector r_tilde(lags);
    for (Eigen::Index l = 0; l < lags; ++l)
      r_tilde(l) = pi.dot(covariations.response[static_cast<std::size_t>(l)] * pi);
    Vector c_tilde(2 * lags - 1);
    for (Eigen::Index k2 = 0; k2 < c_tilde.size(); ++k2)
      c_tilde(k2) = pi.dot(covariations.flow[static_cast<std::size_t>(k2)] * pi);

    est.numerator = kernel_derivative.dot(r_tilde) * dt;
    double den = 0.0;
    for (Eigen::Index l = 0; l < lags; ++l)
      for (Eigen::Index m = 0; m < lags; ++m)
        den += kernel_derivative(l) * kernel_derivative(m) * c_tilde(l - m + lags - 1);
    est.denominator = den * dt * dt;

    if (!(est.denominator > 0.0) || !std::isfinite(est.denominator)) {
      est.status = ModeStatus::ZeroDenominator;
      continue;
    }
    est.g = est.numerator / est.denominator / est.eigenvalue;
    if (est.g < 0.0) {
      est.status = ModeStatus::Negative;
      if (keep_negative) out.liquidities(static_cast<Eigen::Index>(a)) = est.g;
    } else {
      est.status = ModeStatus::Estimated;
      out.liquidities(static_cast<Eigen::Index>(a)) = est.g;
    }
  }
  return out;
}

PropagatorModel CalibrationReport::model() const {
  if (!complete || !eigen || !kernel || !covariance) throw NumericalError("calibration report is incomplete");
  PropagatorModel m;
  m.eigen = *eigen;
  m.liquidities = liquidities;
  m.kernel = kernel->kernel();
  m.volatilities = covariance->sigma;
  m.instrument_ids = instrument_ids;
  m.validate_shapes();
  return m;
}

CalibrationReport run_box2_pipeline(const MarketSeries& input, const CalibrationConfig& config) {
  CalibrationReport report;
  report.config = config;
  std::string step = "input";
  try {
    input.validate();
    const MarketSeries series = config.bin_seconds > 0.0 ? resample(input, config.bin_seconds) : input;
    report.instrument_ids = series.instrument_ids;
    report.dt = series.dt;

    step = "covariance";
    report.covariance = estimate_covariance_and_standardize(series, config.horizon_bins);

    step = "covariations";
    report.covariations = compute_covariations(report.covariance->standardized, config.max_lag);

    step = "kernel";
    report.kernel = deconvolve_kernel(*report.covariations, config.ridge);

    step = "eigen";
    report.raw_eigen = decompose(report.covariance->rho);
    report.eigen_floor = config.eigen_floor * std::max(report.raw_eigen->values(0), 0.0);
    report.eigen = clean_eigenvalues(*report.raw_eigen, report.eigen_floor);

    step = "liquidities";
    EigenPortfolios portfolios;
    for (std::size_t a = 0; a < report.raw_eigen->size(); ++a)
      if (report.raw_eigen->values(static_cast<Eigen::Index>(a)) >= report.eigen_floor &&
          report.eigen->values(static_cast<Eigen::Index>(a)) > 0.0)
        portfolios.modes.push_back(a);
    portfolios.weights.resize(static_cast<Eigen::Index>(report.eigen->size()),
                              static_cast<Eigen::Index>(portfolios.modes.size()));
    for (std::size_t k = 0; k < portfolios.modes.size(); ++k) {
      const auto a = static_cast<Eigen::Index>(portfolios.modes[k]);
      portfolios.weights.col(static_cast<Eigen::Index>(k)) =
          report.eigen->vectors.col(a) / std::sqrt(report.eigen->values(a));
    }
    auto estimate = estimate_mode_liquidities(*report.covariations, *report.eigen, portfolios,
                                              report.kernel->derivative, config.force_negative);
    report.modes = std::move(estimate.modes);
    report.liquidities = std::move(estimate.liquidities);
    report.complete = true;
  } catch (const InputError& e) {
    report.failed_step = step;
    report.failure_category = "input";
    report.failure_message = e.what();
  } catch (const ConfigError& e) {
    report.failed_step = step;
    report.failure_category = "config";
    report.failure_message = e.what();
  } catch (const std::exception& e) {
    report.failed_step = step;
    report.failure_category = "numerical";
    report.failure_message = e.what();
  }
  return report;
}

}  // namespace elm
