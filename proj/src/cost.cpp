#include "elm/cost.hpp"

#include <cmath>
#include <string>

#include "elm/error.hpp"

namespace elm {

ExecutionSchedule::ExecutionSchedule(TimeGrid grid, Matrix rates) : grid_(grid), rates_(std::move(rates)) {
  if (rates_.cols() != static_cast<Eigen::Index>(grid_.n_bins()))
    throw InputError("schedule has " + std::to_string(rates_.cols()) + " bins, grid has " +
                     std::to_string(grid_.n_bins()));
  if (!rates_.allFinite()) throw InputError("schedule contains non-finite rates");
  totals_ = rates_.rowwise().sum() * grid_.dt();
}

ExecutionSchedule ExecutionSchedule::zeros(const TimeGrid& grid, std::size_t n_assets) {
  return {grid, Matrix::Zero(static_cast<Eigen::Index>(n_assets), static_cast<Eigen::Index>(grid.n_bins()))};
}

ExecutionSchedule ExecutionSchedule::synchronous(const TimeGrid& grid, const Vector& totals, const Vector& profile) {
  if (profile.size() != static_cast<Eigen::Index>(grid.n_bins()))
    throw InputError("profile length does not match grid");
  return {grid, totals * profile.transpose()};
}

double portfolio_risk(const Vector& position, const Matrix& rho) {
  if (position.size() != rho.rows() || rho.cols() != rho.rows())
    throw InputError("position and correlation dimensions differ");
  return std::sqrt(std::max(position.dot(rho * position), 0.0));
}

double portfolio_risk(const Vector& position, const CorrelationMatrix& rho) {
  return portfolio_risk(position, rho.matrix());
}

double schedule_cost(const Matrix& rates, const Matrix& impact, const Matrix& kernel_matrix) {
  if (rates.rows() != impact.rows()) throw InputError("schedule and model instrument counts differ");
  if (rates.cols() != kernel_matrix.rows()) throw InputError("schedule and kernel matrix bin counts differ");
  const Matrix temporal = rates * kernel_matrix * rates.transpose();
  return 0.5 * impact.cwiseProduct(temporal).sum();
}

double schedule_cost(const ExecutionSchedule& schedule, const PropagatorModel& model) {
  if (schedule.n_assets() != model.size()) throw InputError("schedule and model instrument counts differ");
  return schedule_cost(schedule.rates(), assemble_impact_matrix(model),
                       build_kernel_matrix(model.kernel, schedule.grid()));
}

Matrix project_to_modes(const ExecutionSchedule& schedule, const EigenStructure& eigen) {
  if (schedule.n_assets() != eigen.size()) throw InputError("schedule and eigenstructure sizes differ");
  return sqrt_correlation(eigen).transpose() * schedule.rates();
}

Eigencost eigencost(const ExecutionSchedule& schedule, const PropagatorModel& model) {
  const Matrix projected = project_to_modes(schedule, model.eigen);
  const Matrix m = build_kernel_matrix(model.kernel, schedule.grid());
  Eigencost out{0.0, Vector::Zero(projected.rows())};
  for (Eigen::Index a = 0; a < projected.rows(); ++a) {
    const Vector qa = projected.row(a).transpose();
    if (model.liquidities(a) < 0.0) throw NumericalError("negative mode liquidity in eigencost");
    out.per_mode(a) = 0.5 * model.liquidities(a) * qa.dot(m * qa);
  }
  out.total = out.per_mode.sum();
  return out;
}

ExecutionSchedule fragmentation_shift(const ExecutionSchedule& schedule, std::size_t i, std::size_t j,
                                      std::span<const double> delta) {
  const std::size_t n = schedule.n_assets();
  if (i >= n || j >= n) throw InputError("fragmentation index out of range");
  if (i == j) throw InputError("fragmentation needs two distinct instruments");
  if (delta.size() != schedule.grid().n_bins()) throw InputError("fragmentation profile length mismatch");
  Matrix rates = schedule.rates();
  const Eigen::Map<const Vector> d(delta.data(), static_cast<Eigen::Index>(delta.size()));
  rates.row(static_cast<Eigen::Index>(i)) += d.transpose();
  rates.row(static_cast<Eigen::Index>(j)) -= d.transpose();
  return {schedule.grid(), std::move(rates)};
}

double round_trip_cost(const ExecutionSchedule& schedule, const PropagatorModel& model, double tol) {
  const double gross = schedule.rates().cwiseAbs().rowwise().sum().maxCoeff() * schedule.grid().dt();
  const double net = schedule.totals().cwiseAbs().maxCoeff();
  if (net > tol * gross + 1e-12) throw InputError("round trip schedule has non-zero terminal totals");
  return schedule_cost(schedule, model);
}

}  // namespace elm
