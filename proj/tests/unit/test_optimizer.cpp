#include <doctest.h>

#include <cmath>

#include "elm/cost.hpp"
#include "elm/error.hpp"
#include "elm/optimizer.hpp"
#include "helpers.hpp"

using namespace elm;

TEST_CASE("two bins split evenly") {
  const TimeGrid g(600.0, 2);
  const OptimalProfile p = solve_optimal_profile(DecayKernel(0.4, 30.0), g);
  CHECK(p.psi(0) == doctest::Approx(1.0 / 600.0).epsilon(1e-12));
  CHECK(p.psi(1) == doctest::Approx(1.0 / 600.0).epsilon(1e-12));
}

TEST_CASE("small grids match the KKT and grid-search oracles") {
  const DecayKernel paper(0.2, 90.0);
  std::mt19937_64 rng(12);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      const DecayKernel k = trial == 0 ? paper : testkit::random_kernel(rng);
      const TimeGrid g(trial == 0 ? kTradingDaySeconds : testkit::uniform(rng, 600, 30000), n);
      const Matrix m = build_kernel_matrix(k, g);
      const OptimalProfile p = solve_optimal_profile(k, g);
      const Vector kkt = testkit::kkt_profile(m, g.dt());
      const Vector grid = testkit::grid_search_profile(m, g.dt());
      const double c = p.psi.dot(m * p.psi);
      CHECK(testkit::rel_diff(c, kkt.dot(m * kkt)) < 1e-6);
      CHECK(testkit::rel_diff(c, grid.dot(m * grid)) < 1e-6);
      CHECK(c <= grid.dot(m * grid) * (1 + 1e-9));
      CHECK((p.psi - kkt).cwiseAbs().maxCoeff() < 1e-6 * kkt.cwiseAbs().maxCoeff());
      CHECK(p.kernel_norm == doctest::Approx(c).epsilon(1e-12));
    }
  }
}

TEST_CASE("optimal profile: normalization, symmetry, stationarity, bucket shape") {
  for (std::size_t bins : {96u, 192u}) {
    const TimeGrid g(kTradingDaySeconds, bins);
    const DecayKernel k(0.2, 90.0);
    const OptimalProfile p = solve_optimal_profile(k, g);
    const Matrix m = build_kernel_matrix(k, g);
    CHECK(p.psi.sum() * g.dt() == doctest::Approx(1.0).epsilon(1e-12));
    const auto n = p.psi.size();
    for (Eigen::Index i = 0; i < n; ++i) CHECK(p.psi(i) == doctest::Approx(p.psi(n - 1 - i)).epsilon(1e-12));
    const Vector resid = 2.0 * m * p.psi - Vector::Constant(n, p.multiplier * g.dt());
    CHECK(resid.norm() <= 1e-8 * (2.0 * m * p.psi).norm());
    CHECK(p.multiplier == doctest::Approx(2.0 * p.kernel_norm).epsilon(1e-10));
    // decreasing into the middle, then increasing
    for (Eigen::Index i = 1; i < n / 2; ++i) CHECK(p.psi(i) < p.psi(i - 1));
    CHECK(p.psi(0) > 2.0 * p.psi(n / 2));
  }
}

TEST_CASE("figure-one profile comparison") {
  for (std::size_t bins : {96u, 192u}) {
    const TimeGrid g(kTradingDaySeconds, bins);
    const auto rows = profile_cost_comparison(standard_profiles(g), DecayKernel(0.2, 90.0), g);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].name == "optimal");
    CHECK(rows[0].relative_excess == 0.0);
    for (const auto& r : rows) {
      CHECK(r.relative_excess >= 0.0);
      if (r.name == "flat_2h_midday") CHECK(std::abs(r.relative_excess - 0.30) <= 0.08);
      if (r.name == "linear_increasing") CHECK(std::abs(r.relative_excess - 0.07) <= 0.03);
    }
  }
  const TimeGrid g(kTradingDaySeconds, 96);
  std::vector<NamedProfile> bad{{"half", Vector::Constant(96, 0.5 / kTradingDaySeconds)}};
  CHECK_THROWS_AS(profile_cost_comparison(bad, DecayKernel(0.2, 90.0), g), InputError);
}

TEST_CASE("standard profiles are normalized") {
  const TimeGrid g(kTradingDaySeconds, 96);
  for (const auto& p : standard_profiles(g)) {
    CHECK(p.psi.sum() * g.dt() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.psi.minCoeff() >= 0.0);
  }
  const auto profiles = standard_profiles(g);
  // two hours of midday trading on a 5-minute grid is 24 bins
  CHECK((profiles[1].psi.array() > 0.0).count() == 24);
}

TEST_CASE("portfolio schedule") {
  std::mt19937_64 rng(13);
  const TimeGrid g(kTradingDaySeconds, 32);
  const PropagatorModel m = testkit::random_model(rng, 3);
  const ExecutionSchedule zero = optimal_portfolio_schedule(Vector::Zero(3), m, g);
  CHECK(zero.rates().cwiseAbs().maxCoeff() == 0.0);

  const PropagatorModel single = make_model(CorrelationMatrix::identity(1), Vector::Constant(1, 1e-7), m.kernel);
  const OptimalProfile p = solve_optimal_profile(m.kernel, g);
  const ExecutionSchedule s1 = optimal_portfolio_schedule(Vector::Constant(1, 4e6), single, g);
  CHECK((s1.rates().row(0).transpose() - 4e6 * p.psi).cwiseAbs().maxCoeff() < 1e-9 * 4e6 * p.psi.maxCoeff());

  Vector q(3);
  q << 1e6, -2e6, 5e5;
  const ExecutionSchedule s = optimal_portfolio_schedule(q, m, g);
  CHECK((s.totals() - q).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(testkit::rel_diff(schedule_cost(s, m), optimal_portfolio_cost(q, m, p)) < 1e-10);

  PropagatorModel bad = m;
  bad.liquidities(1) = -1e-7;
  CHECK_THROWS_AS(optimal_portfolio_schedule(q, bad, g), NumericalError);
}

TEST_CASE("two-asset optimum is set by the absolute or relative mode") {
  const TimeGrid g(kTradingDaySeconds, 48);
  const double r = 0.6, ga = 1e-7, gr = 7e-7, qsize = 3e6;
  const PropagatorModel m = two_asset_model(r, ga, gr, DecayKernel(0.2, 90.0));
  const OptimalProfile p = solve_optimal_profile(m.kernel, g);
  const TwoAssetImpact box = two_asset_impact(r, ga, gr);
  Vector q(2);
  q << qsize, qsize;
  CHECK(testkit::rel_diff(optimal_portfolio_cost(q, m, p), qsize * qsize * box.abs() * p.kernel_norm) < 1e-10);
  q << qsize, -qsize;
  CHECK(testkit::rel_diff(optimal_portfolio_cost(q, m, p), qsize * qsize * box.rel() * p.kernel_norm) < 1e-10);
}

TEST_CASE("general KKT solution is synchronous") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 8; ++trial) {
    const auto n = static_cast<Eigen::Index>(testkit::uniform_int(rng, 1, 4));
    const PropagatorModel m = testkit::random_model(rng, n);
    const TimeGrid g(kTradingDaySeconds, testkit::uniform_int(rng, 4, 16));
    const Vector q = testkit::gaussian(rng, n, 1).col(0) * 1e6;
    const KktSolution k = solve_general_kkt(q, m, g);
    const OptimalProfile p = solve_optimal_profile(m.kernel, g);
    CHECK_FALSE(k.minimum_norm);
    CHECK((k.schedule.totals() - q).cwiseAbs().maxCoeff() < 1e-6 * q.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector expected = q(i) * p.psi;
      CHECK((k.schedule.rates().row(i).transpose() - expected).cwiseAbs().maxCoeff() <=
            1e-6 * std::abs(q(i)) * p.psi.maxCoeff());
    }
    const double sync = optimal_portfolio_cost(q, m, p);
    CHECK(testkit::rel_diff(k.cost, sync) < 1e-8);
    // a feasible but asynchronous schedule is strictly worse
    Matrix rates = k.schedule.rates();
    Vector bump = testkit::gaussian(rng, static_cast<Eigen::Index>(g.n_bins()), 1).col(0);
    bump.array() -= bump.mean();
    rates.row(0) += 1e-3 * std::abs(q(0)) / g.horizon() * bump.transpose();
    CHECK(schedule_cost(ExecutionSchedule(g, rates), m) > k.cost);
  }
}

TEST_CASE("general KKT with a zero-risk mode falls back to minimum norm") {
  Matrix rho(2, 2);
  rho << 1, 1, 1, 1;
  Vector gl(2);
  gl << 3e-7, 5e-7;
  const PropagatorModel m = make_model(CorrelationMatrix(rho), gl, DecayKernel(0.2, 90.0));
  const TimeGrid g(kTradingDaySeconds, 8);
  Vector q(2);
  q << 1e6, 2e6;
  const KktSolution k = solve_general_kkt(q, m, g);
  CHECK(k.minimum_norm);
  const OptimalProfile p = solve_optimal_profile(m.kernel, g);
  CHECK(testkit::rel_diff(k.cost, optimal_portfolio_cost(q, m, p)) < 1e-8);
  CHECK((k.schedule.totals() - q).cwiseAbs().maxCoeff() < 1e-6 * 2e6);
}

TEST_CASE("general KKT size guard") {
  std::mt19937_64 rng(15);
  const PropagatorModel m = testkit::random_model(rng, 50);
  CHECK_THROWS_AS(solve_general_kkt(Vector::Ones(50), m, TimeGrid(kTradingDaySeconds, 96)), ConfigError);
}
