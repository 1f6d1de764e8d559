#include "elm/kernel.hpp"

#include <cmath>
#include <string>

#include "elm/error.hpp"

namespace elm {

DecayKernel::DecayKernel(double alpha, double tau0_seconds) : alpha_(alpha), tau0_(tau0_seconds) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("kernel alpha must be positive, got " + std::to_string(alpha));
  if (!(tau0_seconds > 0.0) || !std::isfinite(tau0_seconds))
    throw ConfigError("kernel tau0 must be positive, got " + std::to_string(tau0_seconds));
}

double DecayKernel::operator()(double tau) const {
  if (tau < 0.0) return 0.0;
  if (tau == 0.0) return 1.0;
  return std::pow(1.0 + tau / tau0_, -alpha_);
}

TimeGrid::TimeGrid(double horizon_seconds, std::size_t n_bins)
    : horizon_(horizon_seconds), n_bins_(n_bins) {
  if (!(horizon_seconds > 0.0) || !std::isfinite(horizon_seconds))
    throw ConfigError("grid horizon must be positive");
  if (n_bins < 2) throw ConfigError("grid needs at least 2 bins, got " + std::to_string(n_bins));
}

Vector TimeGrid::midpoints() const {
  Vector t(static_cast<Eigen::Index>(n_bins_));
  for (std::size_t k = 0; k < n_bins_; ++k) t(static_cast<Eigen::Index>(k)) = midpoint(k);
  return t;
}

TimeGrid default_grid() { return TimeGrid(kTradingDaySeconds, kDefaultBins); }

double eval_kernel(const DecayKernel& kernel, double tau) { return kernel(tau); }

double eval_kernel_derivative(const DecayKernel& kernel, double tau, double dtau) {
  if (!(dtau > 0.0)) throw ConfigError("kernel derivative step must be positive");
  return (kernel(tau + dtau) - kernel(tau)) / dtau;
}

Matrix build_kernel_matrix(const DecayKernel& kernel, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n_bins());
  const double dt = grid.dt();
  const double w = dt * dt;
  // Toeplitz: one kernel evaluation per lag.
  Vector by_lag(n);
  for (Eigen::Index lag = 0; lag < n; ++lag) by_lag(lag) = kernel(static_cast<double>(lag) * dt) * w;
  Matrix m(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l) m(k, l) = by_lag(std::abs(k - l));
  return m;
}

PsdCheck check_kernel_matrix_psd(const Matrix& kernel_matrix, double eps) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(kernel_matrix, Eigen::EigenvaluesOnly);
  const double min_ev = solver.eigenvalues().minCoeff();
  const double tr = kernel_matrix.trace();
  return {min_ev, tr, min_ev >= -eps * tr};
}

double kernel_norm(const Vector& profile, const Matrix& kernel_matrix) {
  if (profile.size() != kernel_matrix.rows())
    throw InputError("profile length does not match kernel matrix");
  return profile.dot(kernel_matrix * profile);
}

}  // namespace elm
