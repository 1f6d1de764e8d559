#include "elm/optimizer.hpp"

#include <cmath>
#include <string>

#include "elm/error.hpp"

namespace elm {

OptimalProfile solve_optimal_profile(const DecayKernel& kernel, const TimeGrid& grid) {
  const Matrix m = build_kernel_matrix(kernel, grid);
  const auto n = m.rows();
  const double ridge = 1e-12 * m.trace() / static_cast<double>(n);
  Matrix regularized = m;
  regularized.diagonal().array() += ridge;

  Eigen::LLT<Matrix> llt(regularized);
  if (llt.info() != Eigen::Success) throw NumericalError("kernel matrix is singular beyond the ridge floor");
  Vector psi = llt.solve(Vector::Ones(n));
  const double dt = grid.dt();
  const double total = psi.sum() * dt;
  if (!(std::abs(total) > 0.0) || !psi.allFinite()) throw NumericalError("optimal profile normalization failed");
  psi /= total;

  // Exact time reversal symmetry of the Toeplitz system; average out
  // round-off so the returned profile is symmetric to machine precision.
  psi = 0.5 * (psi + psi.reverse().eval());
  psi /= psi.sum() * dt;

  const Vector m_psi = m * psi;
  const double norm = psi.dot(m_psi);
  // Stationarity of the Lagrangian: 2 M psi = lambda * dt * 1, and
  // contracting with psi gives lambda = 2 psi^T M psi.
  return {grid, std::move(psi), norm, 2.0 * norm};
}

ExecutionSchedule optimal_portfolio_schedule(const Vector& targets, const PropagatorModel& model,
                                             const TimeGrid& grid) {
  if (targets.size() != static_cast<Eigen::Index>(model.size())) throw InputError("target count does not match model");
  const auto report = check_no_manipulation(model);
  if (!report.passed) throw NumericalError("model admits price manipulation; refusing to optimize");
  const OptimalProfile profile = solve_optimal_profile(model.kernel, grid);
  return ExecutionSchedule::synchronous(grid, targets, profile.psi);
}

double optimal_portfolio_cost(const Vector& targets, const PropagatorModel& model, const OptimalProfile& profile) {
  const Vector projected = sqrt_correlation(model.eigen).transpose() * targets;
  return 0.5 * profile.kernel_norm * projected.cwiseAbs2().dot(model.liquidities);
}

KktSolution solve_general_kkt(const Vector& targets, const PropagatorModel& model, const TimeGrid& grid) {
  const auto n_assets = static_cast<Eigen::Index>(model.size());
  const auto n_bins = static_cast<Eigen::Index>(grid.n_bins());
  if (targets.size() != n_assets) throw InputError("target count does not match model");
  if (n_assets * n_bins > 4000) throw ConfigError("general KKT problem too large for the dense solver");

  const Matrix g = assemble_impact_matrix(model);
  const Matrix m = build_kernel_matrix(model.kernel, grid);
  const double dt = grid.dt();

  // Unknowns ordered asset-major: x[i * n_bins + k] = q^i(t_k).
  const Eigen::Index n_x = n_assets * n_bins;
  const Eigen::Index dim = n_x + n_assets;
  Matrix kkt = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < n_assets; ++i)
    for (Eigen::Index j = 0; j < n_assets; ++j) kkt.block(i * n_bins, j * n_bins, n_bins, n_bins) = g(i, j) * m;
  for (Eigen::Index i = 0; i < n_assets; ++i) {
    kkt.block(n_x + i, i * n_bins, 1, n_bins).setConstant(dt);
    kkt.block(i * n_bins, n_x + i, n_bins, 1).setConstant(dt);
  }
  Vector rhs = Vector::Zero(dim);
  rhs.tail(n_assets) = targets;

  Eigen::FullPivLU<Matrix> lu(kkt);
  lu.setThreshold(1e-12);
  Vector solution;
  bool min_norm = false;
  if (lu.isInvertible()) {
    solution = lu.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
    cod.setThreshold(1e-12);
    solution = cod.solve(rhs);
    min_norm = true;
  }

  Matrix rates(n_assets, n_bins);
  for (Eigen::Index i = 0; i < n_assets; ++i) rates.row(i) = solution.segment(i * n_bins, n_bins).transpose();
  ExecutionSchedule schedule(grid, std::move(rates));
  const double cost = schedule_cost(schedule.rates(), g, m);
  // Reported so that H x = A^T mu holds at the optimum.
  Vector mu = -solution.tail(n_assets);
  return {std::move(schedule), std::move(mu), cost, min_norm};
}

std::vector<NamedProfile> standard_profiles(const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n_bins());
  const double dt = grid.dt();
  const double horizon = grid.horizon();
  const Vector t = grid.midpoints();

  Vector flat = Vector::Constant(n, 1.0 / horizon);

  Vector midday = Vector::Zero(n);
  const double lo = 0.5 * horizon - 3600.0;
  const double hi = 0.5 * horizon + 3600.0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (t(k) >= lo && t(k) <= hi) midday(k) = 1.0;
  if (midday.sum() == 0.0) throw ConfigError("grid too coarse or too short for a two-hour midday window");
  midday /= midday.sum() * dt;

  Vector linear = 2.0 * t / (horizon * horizon);
  linear /= linear.sum() * dt;

  return {{"flat_day", flat}, {"flat_2h_midday", midday}, {"linear_increasing", linear}};
}

std::vector<ProfileCostRow> profile_cost_comparison(const std::vector<NamedProfile>& profiles,
                                                    const DecayKernel& kernel, const TimeGrid& grid) {
  const Matrix m = build_kernel_matrix(kernel, grid);
  const double dt = grid.dt();
  for (const auto& p : profiles) {
    if (p.psi.size() != m.rows()) throw InputError("profile '" + p.name + "' has the wrong length");
    const double total = p.psi.sum() * dt;
    if (std::abs(total - 1.0) > 1e-8) throw InputError("profile '" + p.name + "' is not normalized to unit total");
  }
  const OptimalProfile optimal = solve_optimal_profile(kernel, grid);
  std::vector<ProfileCostRow> rows;
  rows.push_back({"optimal", optimal.kernel_norm, 0.0});
  for (const auto& p : profiles) {
    const double norm = kernel_norm(p.psi, m);
    rows.push_back({p.name, norm, norm / optimal.kernel_norm - 1.0});
  }
  return rows;
}

}  // namespace elm
