#include "elm/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "elm/error.hpp"

namespace elm {

namespace {

constexpr std::uint64_t kNoiseStream = 1u << 20;

Vector response_increments(const DecayKernel& kernel, double dt, std::size_t memory) {
  Vector inc(static_cast<Eigen::Index>(memory) + 1);
  for (std::size_t m = 0; m <= memory; ++m) {
    const double tau = static_cast<double>(m) * dt;
    inc(static_cast<Eigen::Index>(m)) = kernel(tau) - kernel(tau - dt);
  }
  return inc;
}

Vector resolved_flow_scale(const WorldConfig& config) {
  if (config.flow_scale.size() == 0) return Vector::Ones(static_cast<Eigen::Index>(config.model.size()));
  return config.flow_scale;
}

Matrix psd_sqrt(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (cov + cov.transpose()));
  return solver.eigenvectors() * solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

void WorldConfig::validate() const {
  model.validate_shapes();
  const auto n = static_cast<Eigen::Index>(model.size());
  if (flow_scale.size() != 0 && flow_scale.size() != n) throw ConfigError("flow_scale length does not match model");
  if (flow_scale.size() != 0 && (flow_scale.array() < 0.0).any()) throw ConfigError("flow scales must be non-negative");
  if (!(flow_persistence >= 0.0 && flow_persistence < 1.0)) throw ConfigError("flow persistence must lie in [0, 1)");
  if (!(noise_share >= 0.0 && noise_share <= 1.0)) throw ConfigError("noise share must lie in [0, 1]");
  if (n_days < 1) throw ConfigError("world needs at least one day");
  if (bins_per_day < 2) throw ConfigError("world needs at least two bins per day");
  if (!(bin_seconds > 0.0)) throw ConfigError("bin length must be positive");
  if (memory_bins < 1) throw ConfigError("impact memory must be at least one bin");
  if ((model.liquidities.array() < 0.0).any()) throw ConfigError("ground-truth model has negative mode liquidity");
  if ((model.volatilities.array() <= 0.0).any()) throw ConfigError("volatilities must be positive");
  for (const auto& imp : impulses) {
    if (imp.asset >= model.size() || imp.bin >= n_days * bins_per_day)
      throw ConfigError("impulse outside the simulated world");
  }
}

Matrix impact_daily_covariance(const WorldConfig& config, const Vector& flow_sd) {
  const std::size_t b = config.bins_per_day;
  const std::size_t k = config.memory_bins;
  const double dt = config.bin_seconds;
  const Vector inc = response_increments(config.model.kernel, dt, k);

  // Weight of a trade at bin s (relative to the day start, s in [-K, B)) in
  // the day's total impact-driven price change.
  const std::size_t w_len = b + k;
  Vector prefix(static_cast<Eigen::Index>(k) + 2);
  prefix(0) = 0.0;
  for (std::size_t m = 0; m <= k; ++m)
    prefix(static_cast<Eigen::Index>(m) + 1) = prefix(static_cast<Eigen::Index>(m)) + inc(static_cast<Eigen::Index>(m));
  Vector w(static_cast<Eigen::Index>(w_len));
  for (std::size_t idx = 0; idx < w_len; ++idx) {
    const long s = static_cast<long>(idx) - static_cast<long>(k);
    const long lo = std::max(0L, -s);
    const long hi = std::min(static_cast<long>(k), static_cast<long>(b) - 1 - s);
    w(static_cast<Eigen::Index>(idx)) =
        hi >= lo ? prefix(static_cast<Eigen::Index>(hi) + 1) - prefix(static_cast<Eigen::Index>(lo)) : 0.0;
  }
  const double a = config.flow_persistence;
  double kappa = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    kappa += w(i) * w(i);
    double decay = 1.0;
    for (Eigen::Index j = i + 1; j < w.size(); ++j) {
      decay *= a;
      if (decay == 0.0) break;
      kappa += 2.0 * w(i) * w(j) * decay;
    }
  }
  kappa *= dt * dt;
  const Matrix g = assemble_impact_matrix(config.model);
  return kappa * g * flow_sd.cwiseAbs2().asDiagonal() * g;
}

SyntheticMarket simulate_world(const WorldConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.model.size());
  const std::size_t b = config.bins_per_day;
  const auto t_total = static_cast<Eigen::Index>(config.n_days * b);
  const auto memory = static_cast<Eigen::Index>(config.memory_bins);
  const double dt = config.bin_seconds;
  const Matrix rho = config.model.correlation();

  // Variance split: scale relative flows so impact explains (1 - noise_share)
  // of the average daily variance, the noise covers the remainder of rho.
  const Vector rel = resolved_flow_scale(config);
  const Matrix unit_impact = impact_daily_covariance(config, rel);
  double flow_multiplier = 0.0;
  if (config.noise_share < 1.0) {
    const double tr = unit_impact.trace();
    if (!(tr > 0.0)) throw ConfigError("invalid variance split: flows have no price impact");
    flow_multiplier = std::sqrt((1.0 - config.noise_share) * static_cast<double>(n) / tr);
  }
  SyntheticMarket out;
  out.flow_sd = rel * flow_multiplier;
  out.impact_covariance = unit_impact * flow_multiplier * flow_multiplier;
  out.noise_covariance = rho - out.impact_covariance;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(out.noise_covariance, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10 * static_cast<double>(n))
      throw ConfigError("invalid variance split: impact covariance exceeds the target correlation (min eigenvalue " +
                        std::to_string(solver.eigenvalues().minCoeff()) + ")");
  }
  const Matrix noise_factor = psd_sqrt(out.noise_covariance / static_cast<double>(b));

  // Flows, with `memory` bins of stationary history before the first bin.
  const Eigen::Index total = t_total + memory;
  const double a = config.flow_persistence;
  const double innov = std::sqrt(1.0 - a * a);
  Matrix q(n, total);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    const double sd = out.flow_sd(i);
    double prev = sd * normal(rng);
    q(i, 0) = prev;
    for (Eigen::Index t = 1; t < total; ++t) {
      prev = a * prev + innov * sd * normal(rng);
      q(i, t) = prev;
    }
  }
  for (const auto& imp : config.impulses)
    q(static_cast<Eigen::Index>(imp.asset), static_cast<Eigen::Index>(imp.bin) + memory) += imp.risk / dt;

  const Matrix g = assemble_impact_matrix(config.model);
  const Matrix pushed = g * q * dt;  // G q dt per bin
  const Vector inc = response_increments(config.model.kernel, dt, config.memory_bins);

  Matrix x(n, t_total);
  Rng noise_rng = make_stream(config.seed, kNoiseStream);
  std::normal_distribution<double> normal;
  Vector level = Vector::Zero(n);
  Vector z(n);
  for (Eigen::Index t = 0; t < t_total; ++t) {
    const Eigen::Index now = t + memory;
    Vector ret = Vector::Zero(n);
    for (Eigen::Index m = 0; m <= memory; ++m) ret.noalias() += inc(m) * pushed.col(now - m);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(noise_rng);
    ret.noalias() += noise_factor * z;
    level += ret;
    x.col(t) = level;
  }

  const Vector& sigma = config.model.volatilities;
  out.risk_flows = q.rightCols(t_total);
  out.series.instrument_ids = config.model.instrument_ids;
  out.series.dt = dt;
  out.series.units = FlowUnits::Shares;
  out.series.prices = (sigma.asDiagonal() * x).array() + config.price_level;
  out.series.flows = sigma.cwiseInverse().asDiagonal() * out.risk_flows;
  return out;
}

MarketSeries generate_market(const WorldConfig& config) { return simulate_world(config).series; }

Vector sample_biased_orders(double beta, double participation, const Vector& market_volumes, Rng& rng) {
  if (!(beta >= -1.0 && beta <= 1.0)) throw ConfigError("bias beta must lie in [-1, 1]");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double p_buy = 0.5 * (1.0 + beta);
  Vector q(market_volumes.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double eps = uniform(rng) < p_buy ? 1.0 : -1.0;
    q(i) = eps * participation * market_volumes(i);
  }
  return q;
}

Vector sample_biased_orders(const BiasedOrderConfig& config) {
  Rng rng = make_stream(config.seed, 0);
  return sample_biased_orders(config.beta, config.participation, config.market_volumes, rng);
}

double expected_bias_cost(double beta, const Matrix& impact, const Vector& market_volumes, double participation,
                          double profile_norm) {
  if (impact.rows() != market_volumes.size()) throw InputError("market volumes do not match impact matrix");
  const double b2 = beta * beta;
  const double direct = impact.diagonal().dot(market_volumes.cwiseAbs2());
  const double full = market_volumes.dot(impact * market_volumes);
  return 0.5 * participation * participation * profile_norm * ((1.0 - b2) * direct + b2 * full);
}

double expected_bias_cost(double beta, const PropagatorModel& model, const Vector& market_volumes,
                          double participation, double profile_norm) {
  return expected_bias_cost(beta, assemble_impact_matrix(model), market_volumes, participation, profile_norm);
}

double expected_bias_risk_squared(double beta, const Matrix& rho, const Vector& market_volumes, double participation) {
  if (rho.rows() != market_volumes.size()) throw InputError("market volumes do not match correlation matrix");
  const double b2 = beta * beta;
  const double direct = rho.diagonal().dot(market_volumes.cwiseAbs2());
  const double full = market_volumes.dot(rho * market_volumes);
  return participation * participation * ((1.0 - b2) * direct + b2 * full);
}

BiasSweep bias_cost_ratio_report(const PropagatorModel& model, const Vector& market_volumes,
                                 const BiasSweepConfig& config, double profile_norm) {
  const Matrix g = assemble_impact_matrix(model);
  const Matrix rho = model.correlation();
  if (market_volumes.size() != g.rows()) throw InputError("market volumes do not match model");
  if (config.mc_draws < 2) throw ConfigError("Monte-Carlo needs at least two draws");
  if (!(config.daily_vol_fraction > 0.0)) throw ConfigError("daily volatility fraction must be positive");

  BiasSweep sweep;
  sweep.directional_ratio = market_volumes.dot(g * market_volumes) / g.diagonal().dot(market_volumes.cwiseAbs2());
  const Vector weights = model.eigen.values.cwiseProduct(model.liquidities);
  sweep.top_mode_ratio = weights(0) / weights.mean();

  std::uint64_t stream = 0;
  for (double phi : config.participations) {
    const double notional = phi * market_volumes.cwiseAbs().sum() / config.daily_vol_fraction;
    for (double beta : config.betas) {
      BiasSweepRow row{};
      row.beta = beta;
      row.participation = phi;
      row.expected_cost = expected_bias_cost(beta, g, market_volumes, phi, profile_norm);
      row.expected_cost_bps = row.expected_cost / notional * 1e4;
      row.expected_risk = std::sqrt(expected_bias_risk_squared(beta, rho, market_volumes, phi));
      row.cost_per_risk = row.expected_risk > 0.0 ? row.expected_cost / row.expected_risk : 0.0;

      Rng rng = make_stream(config.seed, stream++);
      double mean = 0.0, m2 = 0.0;
      for (std::size_t d = 0; d < config.mc_draws; ++d) {
        const Vector q = sample_biased_orders(beta, phi, market_volumes, rng);
        const double c = 0.5 * profile_norm * q.dot(g * q);
        const double delta = c - mean;
        mean += delta / static_cast<double>(d + 1);
        m2 += delta * (c - mean);
      }
      const double var = m2 / static_cast<double>(config.mc_draws - 1);
      row.mc_mean = mean;
      row.mc_stderr = std::sqrt(var / static_cast<double>(config.mc_draws));
      sweep.rows.push_back(row);
    }
  }
  return sweep;
}

Vector paper_like_spectrum(std::size_t n, double top_ratio, double bulk_ratio) {
  if (n < 2) throw ConfigError("spectrum needs at least two modes");
  if (!(top_ratio >= 1.0 && top_ratio < static_cast<double>(n))) throw ConfigError("top ratio must lie in [1, N)");
  if (!(bulk_ratio > 0.0 && bulk_ratio <= 1.0)) throw ConfigError("bulk ratio must lie in (0, 1]");

  const double lo = std::pow(1.0 - std::sqrt(bulk_ratio), 2);
  const double hi = std::pow(1.0 + std::sqrt(bulk_ratio), 2);
  constexpr int kGrid = 20000;
  std::vector<double> xs(kGrid + 1), cdf(kGrid + 1, 0.0);
  for (int k = 0; k <= kGrid; ++k) xs[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / kGrid;
  for (int k = 1; k <= kGrid; ++k) {
    const double mid = 0.5 * (xs[static_cast<std::size_t>(k)] + xs[static_cast<std::size_t>(k) - 1]);
    const double dens =
        std::sqrt(std::max((hi - mid) * (mid - lo), 0.0)) / (2.0 * std::numbers::pi * bulk_ratio * mid);
    cdf[static_cast<std::size_t>(k)] = cdf[static_cast<std::size_t>(k) - 1] + dens * (hi - lo) / kGrid;
  }
  const double total = cdf.back();
  const std::size_t bulk = n - 1;
  Vector out(static_cast<Eigen::Index>(n));
  out(0) = top_ratio;
  double bulk_sum = 0.0;
  for (std::size_t k = 0; k < bulk; ++k) {
    const double target = (static_cast<double>(k) + 0.5) / static_cast<double>(bulk) * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const auto idx = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    const double x = xs[std::min(idx, xs.size() - 1)];
    out(static_cast<Eigen::Index>(k) + 1) = x;
    bulk_sum += x;
  }
  out.tail(static_cast<Eigen::Index>(bulk)) *= (static_cast<double>(n) - top_ratio) / bulk_sum;
  std::sort(out.data(), out.data() + out.size(), std::greater<>());
  return out;
}

CorrelationMatrix random_correlation(const Vector& spectrum, Rng& rng, bool market_mode) {
  const auto n = spectrum.size();
  if (n < 1) throw ConfigError("spectrum is empty");
  if ((spectrum.array() < 0.0).any()) throw ConfigError("spectrum must be non-negative");
  std::normal_distribution<double> normal;
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = normal(rng);
  if (market_mode) a.col(0).setOnes();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix o = qr.householderQ() * Matrix::Identity(n, n);
  Matrix cov = o * spectrum.asDiagonal() * o.transpose();
  return CorrelationMatrix::from_covariance(0.5 * (cov + cov.transpose()));
}

PropagatorModel synthetic_model(std::size_t n, std::uint64_t seed, const DecayKernel& kernel, double top_liquidity) {
  if (n < 1) throw ConfigError("model needs at least one instrument");
  if (!(top_liquidity > 0.0)) throw ConfigError("top liquidity must be positive");
  CorrelationMatrix rho = CorrelationMatrix::identity(n);
  if (n > 1) {
    const double top = std::min(1.0 + 0.3 * static_cast<double>(n - 1), 0.5 * static_cast<double>(n) + 0.5);
    Rng rng = make_stream(seed, kNoiseStream + 1);
    rho = random_correlation(paper_like_spectrum(n, top), rng, true);
  }
  EigenStructure eigen = decompose(rho);
  const double scale = std::sqrt(eigen.values(0)) / top_liquidity;
  Vector g = eigen.values.cwiseMax(0.0).cwiseSqrt().cwiseInverse() * scale;
  for (Eigen::Index a = 0; a < g.size(); ++a)
    if (!std::isfinite(g(a))) g(a) = 0.0;
  PropagatorModel model = make_model(rho, g, kernel);
  return model;
}

Vector lognormal_market_volumes(std::size_t n, double median, double log_sd, Rng& rng) {
  if (!(median > 0.0) || !(log_sd >= 0.0)) throw ConfigError("invalid log-normal volume parameters");
  std::normal_distribution<double> normal(std::log(median), log_sd);
  Vector out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = std::exp(normal(rng));
  return out;
}

}  // namespace elm
