#pragma once

// Shared generators and brute-force oracles for the tests. Nothing here calls
// into the library's solvers.

#include <cmath>
#include <functional>
#include <random>

#include "elm/kernel.hpp"
#include "elm/linalg.hpp"
#include "elm/model.hpp"
#include "elm/spectral.hpp"

namespace testkit {

using elm::Matrix;
using elm::Vector;

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Full-rank random correlation from a Gaussian factor model.
inline elm::CorrelationMatrix random_correlation(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix f = gaussian(rng, n, n + 2);
  Matrix cov = f * f.transpose() / static_cast<double>(n + 2);
  cov += 0.05 * Matrix::Identity(n, n);
  const Vector d = cov.diagonal().cwiseSqrt().cwiseInverse();
  Matrix rho = d.asDiagonal() * cov * d.asDiagonal();
  rho = 0.5 * (rho + rho.transpose());
  rho.diagonal().setOnes();
  return elm::CorrelationMatrix(rho);
}

inline elm::DecayKernel random_kernel(std::mt19937_64& rng) {
  return {uniform(rng, 0.05, 0.9), uniform(rng, 10.0, 600.0)};
}

inline elm::PropagatorModel random_model(std::mt19937_64& rng, Eigen::Index n) {
  const auto rho = random_correlation(rng, n);
  Vector g(n);
  for (Eigen::Index a = 0; a < n; ++a) g(a) = uniform(rng, 0.2, 3.0) * 1e-7;
  return elm::make_model(rho, g, random_kernel(rng));
}

/// Independent double-sum cost: causal form, trades interact only with
/// earlier (or same-bin, with weight 1/2) trades.
inline double causal_cost(const Matrix& rates, const Matrix& impact, const elm::DecayKernel& kernel,
                          const elm::TimeGrid& grid) {
  const double dt = grid.dt();
  double total = 0.0;
  for (Eigen::Index k = 0; k < rates.cols(); ++k) {
    const Vector price_push = impact * rates.col(k);
    for (Eigen::Index l = 0; l <= k; ++l) {
      const double lag = grid.midpoint(static_cast<std::size_t>(k)) - grid.midpoint(static_cast<std::size_t>(l));
      const double weight = (k == l ? 0.5 : 1.0) * kernel(lag);
      total += weight * rates.col(l).dot(price_push) * dt * dt;
    }
  }
  return total;
}

/// G = sum_a Lambda^a g^a O_a O_a^T by explicit loops.
inline Matrix impact_oracle(const elm::PropagatorModel& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        g(i, j) += m.eigen.values(a) * m.liquidities(a) * m.eigen.vectors(i, a) * m.eigen.vectors(j, a);
  return g;
}

}  // namespace testkit

namespace testkit {

/// Minimizes psi^T M psi over sum(psi) dt = 1 without calling the library:
/// exhaustive search over a coarse simplex grid (weights in steps of
/// 1/resolution), then pairwise exchange moves with a shrinking step.
inline Vector grid_search_profile(const Matrix& m, double dt, int resolution = 12) {
  const auto n = m.rows();
  Vector best_w;
  double best = INFINITY;
  Vector w(n);
  std::vector<int> parts(static_cast<std::size_t>(n), 0);
  // enumerate compositions of `resolution` into n non-negative parts
  std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index i, int left) {
    if (i == n - 1) {
      parts[static_cast<std::size_t>(i)] = left;
      for (Eigen::Index k = 0; k < n; ++k) w(k) = parts[static_cast<std::size_t>(k)] / static_cast<double>(resolution);
      const double c = w.dot(m * w);
      if (c < best) {
        best = c;
        best_w = w;
      }
      return;
    }
    for (int p = 0; p <= left; ++p) {
      parts[static_cast<std::size_t>(i)] = p;
      rec(i + 1, left - p);
    }
  };
  rec(0, resolution);
  double step = 1.0 / resolution;
  while (step > 1e-12) {
    bool improved = false;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        Vector trial = best_w;
        trial(i) += step;
        trial(j) -= step;
        const double c = trial.dot(m * trial);
        if (c < best) {
          best = c;
          best_w = trial;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  return best_w / dt;
}

/// Dense equality-constrained solve of min psi^T M psi, sum(psi) dt = 1.
inline Vector kkt_profile(const Matrix& m, double dt) {
  const auto n = m.rows();
  Matrix k = Matrix::Zero(n + 1, n + 1);
  k.topLeftCorner(n, n) = 2.0 * m;
  k.topRightCorner(n, 1).setConstant(dt);
  k.bottomLeftCorner(1, n).setConstant(dt);
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  const Vector x = k.fullPivLu().solve(rhs);
  return x.head(n);
}

}  // namespace testkit
