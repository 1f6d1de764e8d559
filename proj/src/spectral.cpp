#include "elm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "elm/error.hpp"

namespace elm {

namespace {

double max_asymmetry(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix rho, double tol) : rho_(std::move(rho)) {
  const auto n = rho_.rows();
  if (n == 0 || rho_.cols() != n) throw InputError("correlation matrix must be square and non-empty");
  if (!rho_.allFinite()) throw InputError("correlation matrix has non-finite entries");
  if (max_asymmetry(rho_) > tol) throw InputError("correlation matrix is not symmetric");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(rho_(i, i) - 1.0) > tol)
      throw InputError("correlation diagonal entry " + std::to_string(i) + " is not 1");
  }
  if (rho_.cwiseAbs().maxCoeff() > 1.0 + tol) throw InputError("correlation entry exceeds 1 in magnitude");
  rho_ = 0.5 * (rho_ + rho_.transpose());
  rho_.diagonal().setOnes();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol * static_cast<double>(n))
    throw InputError("correlation matrix is not positive semidefinite");
}

CorrelationMatrix CorrelationMatrix::from_covariance(const Matrix& cov) {
  const auto n = cov.rows();
  if (cov.cols() != n) throw InputError("covariance must be square");
  Vector sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(cov(i, i) > 0.0)) throw InputError("non-positive variance for instrument " + std::to_string(i));
    sd(i) = std::sqrt(cov(i, i));
  }
  Matrix rho = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
  rho = 0.5 * (rho + rho.transpose());
  rho.diagonal().setOnes();
  return CorrelationMatrix(std::move(rho), 1e-8);
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return CorrelationMatrix(Matrix::Identity(k, k));
}

CorrelationMatrix CorrelationMatrix::two_asset(double r) {
  Matrix m(2, 2);
  m << 1.0, r, r, 1.0;
  return CorrelationMatrix(std::move(m));
}

Matrix EigenStructure::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.transpose();
}

EigenStructure decompose_symmetric(const Matrix& m, double tol) {
  const auto n = m.rows();
  if (n == 0 || m.cols() != n) throw InputError("matrix must be square and non-empty");
  if (max_asymmetry(m) > tol * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw InputError("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed to converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ev(a) > ev(b); });

  EigenStructure out{Matrix(n, n), Vector(n)};
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto src = order[static_cast<std::size_t>(a)];
    double value = ev(src);
    if (std::abs(value) <= 64.0 * std::numeric_limits<double>::epsilon() * scale * static_cast<double>(n))
      value = 0.0;
    out.values(a) = value;
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Ties are resolved towards the lowest index; treat values within
      // round-off as equal.
      if (std::abs(v(i)) > best + 1e-12) {
        best = std::abs(v(i));
        pivot = i;
      }
    }
    if (v(pivot) < 0.0) v = -v;
    out.vectors.col(a) = v;
  }
  return out;
}

EigenStructure decompose(const CorrelationMatrix& rho) { return decompose_symmetric(rho.matrix()); }

EigenStructure clean_eigenvalues(const EigenStructure& eigen, double floor) {
  if (!(floor >= 0.0)) throw ConfigError("eigenvalue floor must be non-negative");
  EigenStructure out = eigen;
  if (floor == 0.0) return out;
  out.values = out.values.cwiseMax(floor);
  const double sum = out.values.sum();
  out.values *= static_cast<double>(out.size()) / sum;
  return out;
}

double default_eigen_floor(const EigenStructure& eigen) {
  return 1e-4 * std::max(eigen.values.maxCoeff(), 0.0);
}

Matrix sqrt_correlation(const EigenStructure& eigen, double tol) {
  const double top = std::max(eigen.values.maxCoeff(), 0.0);
  Vector roots(eigen.values.size());
  for (Eigen::Index a = 0; a < eigen.values.size(); ++a) {
    const double v = eigen.values(a);
    if (v < -tol * std::max(top, 1.0))
      throw NumericalError("negative eigenvalue " + std::to_string(v) + " has no real square root");
    roots(a) = std::sqrt(std::max(v, 0.0));
  }
  return eigen.vectors * roots.asDiagonal();
}

EigenPortfolios eigen_portfolios(const EigenStructure& eigen) {
  for (Eigen::Index a = 0; a < eigen.values.size(); ++a) {
    if (!(eigen.values(a) > 0.0))
      throw NumericalError("mode " + std::to_string(a) + " has non-positive eigenvalue; clean the spectrum first");
  }
  return eigen_portfolios(eigen, 0.0);
}

EigenPortfolios eigen_portfolios(const EigenStructure& eigen, double floor) {
  EigenPortfolios out;
  for (Eigen::Index a = 0; a < eigen.values.size(); ++a)
    if (eigen.values(a) > floor && eigen.values(a) > 0.0) out.modes.push_back(static_cast<std::size_t>(a));
  out.weights.resize(eigen.vectors.rows(), static_cast<Eigen::Index>(out.modes.size()));
  for (std::size_t k = 0; k < out.modes.size(); ++k) {
    const auto a = static_cast<Eigen::Index>(out.modes[k]);
    out.weights.col(static_cast<Eigen::Index>(k)) = eigen.vectors.col(a) / std::sqrt(eigen.values(a));
  }
  return out;
}

}  // namespace elm
