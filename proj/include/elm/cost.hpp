#pragma once

#include <cstddef>
#include <span>

#include "elm/kernel.hpp"
#include "elm/linalg.hpp"
#include "elm/model.hpp"
#include "elm/spectral.hpp"

namespace elm {

/// Per-asset trading rates q^i(t_k) in $ of risk per second, one row per
/// asset and one column per bin, with the implied terminal totals.
class ExecutionSchedule {
 public:
  ExecutionSchedule(TimeGrid grid, Matrix rates);

  static ExecutionSchedule zeros(const TimeGrid& grid, std::size_t n_assets);

  /// Synchronous schedule rates[i][k] = Q^i * psi(t_k).
  static ExecutionSchedule synchronous(const TimeGrid& grid, const Vector& totals, const Vector& profile);

  const TimeGrid& grid() const { return grid_; }
  const Matrix& rates() const { return rates_; }
  const Vector& totals() const { return totals_; }
  std::size_t n_assets() const { return static_cast<std::size_t>(rates_.rows()); }

 private:
  TimeGrid grid_;
  Matrix rates_;
  Vector totals_;
};

/// R = sqrt(Q^T rho Q).
double portfolio_risk(const Vector& position, const CorrelationMatrix& rho);
double portfolio_risk(const Vector& position, const Matrix& rho);

/// C = 1/2 sum_{k,l} q_k^T G q_l phi(|t_k - t_l|) dt^2.
double schedule_cost(const ExecutionSchedule& schedule, const PropagatorModel& model);

/// Same with a precomputed impact matrix and kernel matrix, for hot loops.
double schedule_cost(const Matrix& rates, const Matrix& impact, const Matrix& kernel_matrix);

/// qtilde^a(t_k) = sqrt(Lambda^a) sum_i O[i][a] q^i(t_k); rows are modes.
Matrix project_to_modes(const ExecutionSchedule& schedule, const EigenStructure& eigen);

struct Eigencost {
  double total;
  Vector per_mode;  ///< 1/2 g^a ||qtilde^a||^2
};

Eigencost eigencost(const ExecutionSchedule& schedule, const PropagatorModel& model);

/// q^i += delta, q^j -= delta. Throws InputError on bad indices or length.
ExecutionSchedule fragmentation_shift(const ExecutionSchedule& schedule, std::size_t i, std::size_t j,
                                      std::span<const double> delta);

/// Cost of a schedule whose totals are all zero (within tol relative to the
/// largest gross per-asset volume). Throws InputError otherwise.
double round_trip_cost(const ExecutionSchedule& schedule, const PropagatorModel& model, double tol = 1e-9);

}  // namespace elm
