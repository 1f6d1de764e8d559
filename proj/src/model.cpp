#include "elm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elm/error.hpp"

namespace elm {

void PropagatorModel::validate_shapes() const {
  const auto n = eigen.values.size();
  if (eigen.vectors.rows() != n || eigen.vectors.cols() != n)
    throw InputError("eigenvector matrix does not match eigenvalue count");
  if (liquidities.size() != n) throw InputError("mode liquidity count does not match eigenvalue count");
  if (volatilities.size() != n) throw InputError("volatility count does not match instrument count");
  if (instrument_ids.size() != static_cast<std::size_t>(n))
    throw InputError("instrument id count does not match instrument count");
}

PropagatorModel make_model(const CorrelationMatrix& rho, const Vector& liquidities, const DecayKernel& kernel) {
  PropagatorModel m;
  m.eigen = decompose(rho);
  m.liquidities = liquidities;
  m.kernel = kernel;
  m.volatilities = Vector::Ones(static_cast<Eigen::Index>(rho.size()));
  for (std::size_t i = 0; i < rho.size(); ++i) m.instrument_ids.push_back("S" + std::to_string(i));
  m.validate_shapes();
  return m;
}

namespace {

Matrix assemble_unchecked(const PropagatorModel& model) {
  model.validate_shapes();
  const Vector weights = model.eigen.values.cwiseMax(0.0).cwiseProduct(model.liquidities);
  Matrix g = model.eigen.vectors * weights.asDiagonal() * model.eigen.vectors.transpose();
  return 0.5 * (g + g.transpose());
}

}  // namespace

Matrix assemble_impact_matrix(const PropagatorModel& model) {
  for (Eigen::Index a = 0; a < model.liquidities.size(); ++a) {
    if (model.liquidities(a) < 0.0)
      throw NumericalError("mode " + std::to_string(a) + " has negative liquidity coefficient");
  }
  return assemble_unchecked(model);
}

NoManipulationReport check_no_manipulation(const PropagatorModel& model) {
  NoManipulationReport report;
  const Vector& g = model.liquidities;
  Eigen::Index argmin = 0;
  report.min_liquidity = g.minCoeff(&argmin);
  report.min_liquidity_mode = static_cast<std::size_t>(argmin);
  const double g_scale = std::max(g.cwiseAbs().maxCoeff(), 0.0);
  for (Eigen::Index a = 0; a < g.size(); ++a)
    if (g(a) < -1e-10 * g_scale) report.offending_modes.push_back(static_cast<std::size_t>(a));

  const Matrix impact = assemble_unchecked(model);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(impact, Eigen::EigenvaluesOnly);
  report.min_impact_eigenvalue = solver.eigenvalues().minCoeff();
  const double ev_scale = solver.eigenvalues().cwiseAbs().maxCoeff();
  report.passed = report.offending_modes.empty() && report.min_impact_eigenvalue >= -1e-10 * ev_scale;
  return report;
}

std::vector<ModeLiquidityRow> liquidity_spectrum(const PropagatorModel& model) {
  model.validate_shapes();
  std::vector<ModeLiquidityRow> rows;
  for (Eigen::Index a = 0; a < model.eigen.values.size(); ++a) {
    const double g = model.liquidities(a);
    const double liq = g == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / g;
    rows.push_back({static_cast<std::size_t>(a), model.eigen.values(a), g, liq});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& x, const auto& y) { return x.eigenvalue > y.eigenvalue; });
  return rows;
}

double average_offdiagonal(const Matrix& impact) {
  const auto n = impact.rows();
  if (n < 2 || impact.cols() != n) throw InputError("average off-diagonal needs a square matrix with N >= 2");
  const double off = impact.sum() - impact.trace();
  return off / static_cast<double>(n * (n - 1));
}

Matrix remove_market_mode(const Matrix& impact) {
  const double gbar = average_offdiagonal(impact);
  Matrix out = impact.array() - gbar;
  out.diagonal() = impact.diagonal();
  return out;
}

PropagatorModel two_asset_model(double r, double g_abs, double g_rel, const DecayKernel& kernel) {
  Vector g(2);
  g << g_abs, g_rel;
  PropagatorModel m = make_model(CorrelationMatrix::two_asset(r), g, kernel);
  // build the modes by hand: at r = 0 the spectrum is degenerate and the
  // solver would return the coordinate axes
  const double s = 1.0 / std::sqrt(2.0);
  Matrix abs_rel(2, 2);
  abs_rel << s, s, s, -s;
  Vector values(2);
  values << 1.0 + r, 1.0 - r;
  if (r < 0.0) {
    abs_rel.col(0).swap(abs_rel.col(1));
    std::swap(values(0), values(1));
    std::swap(g(0), g(1));
  }
  m.eigen.vectors = abs_rel;
  m.eigen.values = values;
  m.liquidities = g;
  return m;
}

TwoAssetImpact two_asset_impact(double r, double g_abs, double g_rel) {
  const double a = (1.0 + r) * g_abs;
  const double b = (1.0 - r) * g_rel;
  return {0.5 * (a + b), 0.5 * (a - b)};
}

}  // namespace elm
