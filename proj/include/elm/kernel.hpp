#pragma once

#include <cstddef>

#include "elm/linalg.hpp"

namespace elm {

/// Power-law decay of transient impact, phi(tau) = (1 + tau/tau0)^-alpha for
/// tau >= 0 and zero before the trade.
class DecayKernel {
 public:
  /// Throws ConfigError unless alpha > 0 and tau0 > 0.
  DecayKernel(double alpha, double tau0_seconds);

  double alpha() const { return alpha_; }
  double tau0() const { return tau0_; }

  double operator()(double tau) const;

  friend bool operator==(const DecayKernel&, const DecayKernel&) = default;

 private:
  double alpha_;
  double tau0_;
};

/// Uniform partition of [0, horizon] into n_bins; quantities are sampled at
/// bin midpoints.
class TimeGrid {
 public:
  /// Throws ConfigError unless horizon > 0 and n_bins >= 2.
  TimeGrid(double horizon_seconds, std::size_t n_bins);

  double horizon() const { return horizon_; }
  std::size_t n_bins() const { return n_bins_; }
  double dt() const { return horizon_ / static_cast<double>(n_bins_); }
  double midpoint(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dt(); }
  Vector midpoints() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t n_bins_;
};

inline constexpr double kTradingDaySeconds = 8.0 * 3600.0;
inline constexpr std::size_t kDefaultBins = 96;

TimeGrid default_grid();

double eval_kernel(const DecayKernel& kernel, double tau);

/// Forward difference [phi(tau + dtau) - phi(tau)] / dtau. Throws ConfigError
/// for dtau <= 0.
double eval_kernel_derivative(const DecayKernel& kernel, double tau, double dtau);

/// M[k][l] = phi(|t_k - t_l|) * dt^2 on the grid midpoints. The matrix is the
/// quadrature weight of the double time integral in the cost functional, so
/// psi^T M psi approximates the kernel norm of a profile psi.
Matrix build_kernel_matrix(const DecayKernel& kernel, const TimeGrid& grid);

struct PsdCheck {
  double min_eigenvalue;
  double trace;
  bool passed;
};

/// Smallest eigenvalue against -eps * trace.
PsdCheck check_kernel_matrix_psd(const Matrix& kernel_matrix, double eps = 1e-10);

/// Kernel norm psi^T M psi of a single rate profile.
double kernel_norm(const Vector& profile, const Matrix& kernel_matrix);

}  // namespace elm
