#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "elm/kernel.hpp"
#include "elm/linalg.hpp"
#include "elm/spectral.hpp"

namespace elm {

/// EigenLiquidity propagator model. The impact matrix shares the correlation
/// eigenvectors, G = O diag(Lambda^a g^a) O^T, and is kept in factored form;
/// `impact_matrix()` assembles it on demand.
struct PropagatorModel {
  EigenStructure eigen;
  Vector liquidities;  ///< g^a per mode, 1/$ of risk
  DecayKernel kernel{0.2, 90.0};
  Vector volatilities;  ///< sigma^i, $ per share per day
  std::vector<std::string> instrument_ids;

  std::size_t size() const { return eigen.size(); }
  Matrix correlation() const { return eigen.reconstruct(); }

  /// Throws InputError when the factored pieces disagree in size.
  void validate_shapes() const;
};

/// Builds a model from a correlation matrix; volatilities default to 1 and
/// ids to "S0", "S1", ...
PropagatorModel make_model(const CorrelationMatrix& rho, const Vector& liquidities, const DecayKernel& kernel);

/// G = sum_a O[:, a] Lambda^a g^a O[:, a]^T. Throws NumericalError if any
/// g^a < 0.
Matrix assemble_impact_matrix(const PropagatorModel& model);

struct NoManipulationReport {
  bool passed = false;
  double min_liquidity = 0.0;
  std::size_t min_liquidity_mode = 0;
  double min_impact_eigenvalue = 0.0;
  std::vector<std::size_t> offending_modes;
};

/// Passes iff min g^a and the smallest eigenvalue of G are both
/// >= -1e-10 * (their respective maxima).
NoManipulationReport check_no_manipulation(const PropagatorModel& model);

struct ModeLiquidityRow {
  std::size_t mode;
  double eigenvalue;
  double g;
  double liquidity;  ///< 1/g, +inf when g == 0
};

/// Rows sorted by descending eigenvalue.
std::vector<ModeLiquidityRow> liquidity_spectrum(const PropagatorModel& model);

/// Mean of the off-diagonal entries. Throws InputError for N < 2.
double average_offdiagonal(const Matrix& impact);

/// G - Gbar on off-diagonal entries only; the diagonal is left as is.
Matrix remove_market_mode(const Matrix& impact);

/// Two-stock toy world: correlation r, liquidities on the absolute (1 + r)
/// and relative (1 - r) modes.
PropagatorModel two_asset_model(double r, double g_abs, double g_rel, const DecayKernel& kernel);

/// Entries of the toy G: G^diag and G^off.
struct TwoAssetImpact {
  double diag;
  double off;
  double abs() const { return diag + off; }
  double rel() const { return diag - off; }
};
TwoAssetImpact two_asset_impact(double r, double g_abs, double g_rel);

}  // namespace elm
