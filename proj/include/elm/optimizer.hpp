#pragma once

#include <string>
#include <vector>

#include "elm/cost.hpp"
#include "elm/kernel.hpp"
#include "elm/linalg.hpp"
#include "elm/model.hpp"

namespace elm {

/// Cost-minimizing single-unit profile psi* (1/seconds), with
/// sum_k psi*_k dt = 1.
struct OptimalProfile {
  TimeGrid grid;
  Vector psi;
  double kernel_norm;  ///< ||psi*||^2 = psi*^T M psi*
  double multiplier;   ///< lambda in 2 M psi* = lambda * dt * 1
};

/// Minimizes psi^T M psi subject to sum(psi) dt = 1 by solving a ridged SPD
/// system M psi ∝ 1. The ridge is 1e-12 trace(M)/n.
OptimalProfile solve_optimal_profile(const DecayKernel& kernel, const TimeGrid& grid);

/// Synchronous optimum q(t) = Q psi*(t). Throws NumericalError if the model
/// admits price manipulation.
ExecutionSchedule optimal_portfolio_schedule(const Vector& targets, const PropagatorModel& model,
                                             const TimeGrid& grid);

/// Closed-form cost of the synchronous optimum:
/// sum_a 1/2 g^a (Qtilde^a)^2 ||psi*||^2 with Qtilde = (rho^{1/2})^T Q.
double optimal_portfolio_cost(const Vector& targets, const PropagatorModel& model, const OptimalProfile& profile);

struct KktSolution {
  ExecutionSchedule schedule;
  Vector multipliers;  ///< one per asset total constraint
  double cost;
  /// True when the KKT system was singular (zero-risk modes) and the
  /// minimum-norm solution was returned instead.
  bool minimum_norm;
};

/// Dense KKT solve of min 1/2 vec(q)^T (G ⊗ M) vec(q) s.t. per-asset totals
/// equal Q, with no synchronicity assumed. Intended as a verification
/// oracle; N * n_bins must stay <= 4000.
KktSolution solve_general_kkt(const Vector& targets, const PropagatorModel& model, const TimeGrid& grid);

struct NamedProfile {
  std::string name;
  Vector psi;
};

/// flat_day, flat_2h_midday and linear_increasing, each normalized to
/// unit total on the grid.
std::vector<NamedProfile> standard_profiles(const TimeGrid& grid);

struct ProfileCostRow {
  std::string name;
  double kernel_norm;     ///< psi^T M psi
  double relative_excess; ///< cost / optimal cost - 1
};

/// Appends the optimal profile as "optimal" and reports each profile's
/// excess cost over it. Throws InputError for profiles whose total differs
/// from 1 by more than 1e-8.
std::vector<ProfileCostRow> profile_cost_comparison(const std::vector<NamedProfile>& profiles,
                                                    const DecayKernel& kernel, const TimeGrid& grid);

}  // namespace elm
