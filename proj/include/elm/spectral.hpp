#pragma once

#include <cstddef>
#include <vector>

#include "elm/linalg.hpp"

namespace elm {

/// Symmetric, unit-diagonal, PSD matrix of return correlations.
class CorrelationMatrix {
 public:
  /// Validates symmetry, unit diagonal, |rho_ij| <= 1 and PSD (within
  /// 1e-10 * N). Throws InputError otherwise.
  explicit CorrelationMatrix(Matrix rho, double tol = 1e-10);

  /// Normalizes an arbitrary covariance to unit diagonal. Throws InputError
  /// on a non-positive variance.
  static CorrelationMatrix from_covariance(const Matrix& cov);

  static CorrelationMatrix identity(std::size_t n);

  /// Two-asset correlation [[1, r], [r, 1]].
  static CorrelationMatrix two_asset(double r);

  std::size_t size() const { return static_cast<std::size_t>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return rho_(i, j); }

 private:
  Matrix rho_;
};

/// rho = O diag(Lambda) O^T with eigenvalues sorted descending. Columns of
/// `vectors` are modes.
struct EigenStructure {
  Matrix vectors;
  Vector values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  Matrix reconstruct() const;
};

/// Symmetric eigendecomposition with a deterministic sign convention: the
/// largest-magnitude entry of each eigenvector is positive (ties go to the
/// lowest index). Eigenvalues within round-off of zero are snapped to 0.
EigenStructure decompose(const CorrelationMatrix& rho);

/// Same for any symmetric matrix. Throws InputError if asymmetric beyond tol.
EigenStructure decompose_symmetric(const Matrix& m, double tol = 1e-10);

/// Clips eigenvalues below `floor` to `floor`, then rescales the spectrum so
/// it sums to N. Eigenvectors are untouched.
EigenStructure clean_eigenvalues(const EigenStructure& eigen, double floor);

/// Default cleaning floor, 1e-4 times the top eigenvalue.
double default_eigen_floor(const EigenStructure& eigen);

/// O diag(sqrt(Lambda)). Throws NumericalError on eigenvalues below
/// -tol * max(Lambda); tiny negatives are treated as zero.
Matrix sqrt_correlation(const EigenStructure& eigen, double tol = 1e-10);

/// Uncorrelated unit-risk baskets pi^a = O[:, a] / sqrt(Lambda^a), one
/// column per retained mode.
struct EigenPortfolios {
  Matrix weights;
  std::vector<std::size_t> modes;
};

/// All modes are retained; throws NumericalError if any eigenvalue <= 0.
EigenPortfolios eigen_portfolios(const EigenStructure& eigen);

/// Retains modes with Lambda^a > floor.
EigenPortfolios eigen_portfolios(const EigenStructure& eigen, double floor);

}  // namespace elm
