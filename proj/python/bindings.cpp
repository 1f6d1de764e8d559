#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "elm/calibration.hpp"
#include "elm/cost.hpp"
#include "elm/io.hpp"
#include "elm/optimizer.hpp"
#include "elm/synthgen.hpp"

namespace py = pybind11;
using namespace elm;

namespace {

PropagatorModel model_from_arrays(const Matrix& rho, const Vector& liquidities, const DecayKernel& kernel) {
  return make_model(CorrelationMatrix(rho), liquidities, kernel);
}

py::dict calibrate(const Matrix& prices, const Matrix& flows, double dt, bool risk_units, std::size_t max_lag,
                   std::size_t horizon_bins, double eigen_floor, double ridge) {
  MarketSeries s;
  s.dt = dt;
  s.prices = prices;
  s.flows = flows;
  s.units = risk_units ? FlowUnits::Risk : FlowUnits::Shares;
  for (Eigen::Index i = 0; i < prices.rows(); ++i) s.instrument_ids.push_back("S" + std::to_string(i));
  CalibrationConfig cfg;
  cfg.max_lag = max_lag;
  cfg.horizon_bins = horizon_bins;
  cfg.eigen_floor = eigen_floor;
  cfg.ridge = ridge;
  const CalibrationReport rep = run_box2_pipeline(s, cfg);
  py::dict out;
  out["complete"] = rep.complete;
  out["failed_step"] = rep.failed_step;
  out["failure_category"] = rep.failure_category;
  out["failure_message"] = rep.failure_message;
  if (rep.kernel) {
    out["alpha"] = rep.kernel->alpha;
    out["tau0"] = rep.kernel->tau0;
    out["kernel_table"] = rep.kernel->table;
  }
  if (rep.covariance) {
    out["sigma"] = rep.covariance->sigma;
    out["correlation"] = rep.covariance->rho.matrix();
  }
  if (rep.eigen) out["eigenvalues"] = rep.eigen->values;
  out["liquidities"] = rep.liquidities;
  if (rep.complete) out["model"] = rep.model();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cross-impact propagator model: kernel, optimal execution, costs, calibration";

  py::class_<DecayKernel>(m, "DecayKernel")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("tau0"))
      .def_property_readonly("alpha", &DecayKernel::alpha)
      .def_property_readonly("tau0", &DecayKernel::tau0)
      .def("__call__", &DecayKernel::operator(), py::arg("tau"))
      .def("__repr__", [](const DecayKernel& k) {
        return "DecayKernel(alpha=" + io::format_double(k.alpha()) + ", tau0=" + io::format_double(k.tau0()) + ")";
      });

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<double, std::size_t>(), py::arg("horizon"), py::arg("n_bins"))
      .def_property_readonly("horizon", &TimeGrid::horizon)
      .def_property_readonly("n_bins", &TimeGrid::n_bins)
      .def_property_readonly("dt", &TimeGrid::dt)
      .def("midpoints", &TimeGrid::midpoints);
  m.def("default_grid", &default_grid);

  py::class_<PropagatorModel>(m, "PropagatorModel")
      .def(py::init(&model_from_arrays), py::arg("correlation"), py::arg("liquidities"), py::arg("kernel"))
      .def_property_readonly("eigenvalues", [](const PropagatorModel& p) { return p.eigen.values; })
      .def_property_readonly("eigenvectors", [](const PropagatorModel& p) { return p.eigen.vectors; })
      .def_readwrite("liquidities", &PropagatorModel::liquidities)
      .def_readwrite("volatilities", &PropagatorModel::volatilities)
      .def_readonly("kernel", &PropagatorModel::kernel)
      .def("correlation", &PropagatorModel::correlation)
      .def("impact_matrix", &assemble_impact_matrix)
      .def("to_json", [](const PropagatorModel& p) { return io::to_json(p).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::model_from_json(io::Json::parse(s)); })
      .def("__len__", &PropagatorModel::size);

  m.def("kernel_matrix", &build_kernel_matrix, py::arg("kernel"), py::arg("grid"));
  m.def(
      "optimal_profile",
      [](const DecayKernel& k, const TimeGrid& g) {
        const OptimalProfile p = solve_optimal_profile(k, g);
        return py::make_tuple(p.psi, p.kernel_norm, p.multiplier);
      },
      py::arg("kernel"), py::arg("grid"), "returns (psi, kernel_norm, multiplier)");
  m.def(
      "compare_profiles",
      [](const DecayKernel& k, const TimeGrid& g) {
        py::dict out;
        for (const auto& r : profile_cost_comparison(standard_profiles(g), k, g)) out[py::str(r.name)] = r.relative_excess;
        return out;
      },
      py::arg("kernel"), py::arg("grid"));
  m.def(
      "schedule_cost",
      [](const Matrix& rates, const PropagatorModel& model, const TimeGrid& g) {
        return schedule_cost(ExecutionSchedule(g, rates), model);
      },
      py::arg("rates"), py::arg("model"), py::arg("grid"));
  m.def(
      "eigencost",
      [](const Matrix& rates, const PropagatorModel& model, const TimeGrid& g) {
        return eigencost(ExecutionSchedule(g, rates), model).per_mode;
      },
      py::arg("rates"), py::arg("model"), py::arg("grid"));
  m.def(
      "optimal_schedule",
      [](const Vector& targets, const PropagatorModel& model, const TimeGrid& g) {
        return optimal_portfolio_schedule(targets, model, g).rates();
      },
      py::arg("targets"), py::arg("model"), py::arg("grid"));
  m.def(
      "general_kkt",
      [](const Vector& targets, const PropagatorModel& model, const TimeGrid& g) {
        const KktSolution s = solve_general_kkt(targets, model, g);
        return py::make_tuple(s.schedule.rates(), s.cost, s.minimum_norm);
      },
      py::arg("targets"), py::arg("model"), py::arg("grid"), "returns (rates, cost, minimum_norm)");
  m.def(
      "no_manipulation",
      [](const PropagatorModel& model) { return check_no_manipulation(model).passed; }, py::arg("model"));
  m.def("synthetic_model", &synthetic_model, py::arg("n"), py::arg("seed"), py::arg("kernel"),
        py::arg("top_liquidity") = 30e6);
  m.def(
      "simulate",
      [](const PropagatorModel& model, std::size_t days, std::size_t bins_per_day, std::uint64_t seed) {
        WorldConfig w;
        w.model = model;
        w.n_days = days;
        w.bins_per_day = bins_per_day;
        w.seed = seed;
        const MarketSeries s = generate_market(w);
        return py::make_tuple(s.prices, s.flows, s.dt);
      },
      py::arg("model"), py::arg("days") = 250, py::arg("bins_per_day") = 96, py::arg("seed") = 42,
      "returns (prices, flows in shares/s, dt)");
  m.def("calibrate", &calibrate, py::arg("prices"), py::arg("flows"), py::arg("dt"), py::arg("risk_units") = false,
        py::arg("max_lag") = 60, py::arg("horizon_bins") = 96, py::arg("eigen_floor") = 1e-4, py::arg("ridge") = 1e-6);
}
