#include <doctest.h>

#include <cmath>

#include "elm/error.hpp"
#include "elm/kernel.hpp"
#include "helpers.hpp"

using namespace elm;

TEST_CASE("kernel evaluation") {
  const DecayKernel k(0.2, 90.0);
  CHECK(eval_kernel(k, 0.0) == 1.0);
  CHECK(eval_kernel(k, 90.0) == doctest::Approx(std::pow(2.0, -0.2)).epsilon(1e-14));
  CHECK(eval_kernel(k, 90.0) == doctest::Approx(0.87055).epsilon(1e-5));
  CHECK(eval_kernel(k, -1.0) == 0.0);
  CHECK(eval_kernel(k, -1e-9) == 0.0);
}

TEST_CASE("kernel rejects bad parameters") {
  CHECK_THROWS_AS(DecayKernel(0.0, 90.0), ConfigError);
  CHECK_THROWS_AS(DecayKernel(-0.2, 90.0), ConfigError);
  CHECK_THROWS_AS(DecayKernel(0.2, 0.0), ConfigError);
  CHECK_THROWS_AS(DecayKernel(0.2, NAN), ConfigError);
  CHECK_THROWS_AS(TimeGrid(100.0, 1), ConfigError);
  CHECK_THROWS_AS(TimeGrid(-1.0, 4), ConfigError);
}

TEST_CASE("kernel is decreasing and bounded on random parameters") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const DecayKernel k = testkit::random_kernel(rng);
    double prev = 1.0;
    for (double tau = 1.0; tau < 1e5; tau *= 1.7) {
      const double v = k(tau);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("forward derivative") {
  const DecayKernel k(0.2, 90.0);
  CHECK(eval_kernel_derivative(k, 0.0, 1.0) == doctest::Approx(std::pow(1.0 + 1.0 / 90.0, -0.2) - 1.0).epsilon(1e-12));
  CHECK(eval_kernel_derivative(k, 0.0, 1.0) == doctest::Approx(-2.2096e-3).epsilon(1e-4));
  CHECK(eval_kernel_derivative(k, -10.0, 1.0) == 0.0);
  // long double oracle for the same difference quotient
  const long double a = std::pow(1.0L + 91.0L / 90.0L, -0.2L);
  const long double b = std::pow(2.0L, -0.2L);
  CHECK(eval_kernel_derivative(k, 90.0, 1.0) == doctest::Approx(static_cast<double>(a - b)).epsilon(1e-10));
  // close to the analytic derivative -alpha/tau0 (1 + tau/tau0)^(-alpha-1)
  const double analytic = -0.2 / 90.0 * std::pow(2.0, -1.2);
  CHECK(std::abs(eval_kernel_derivative(k, 90.0, 1e-3) - analytic) < 1e-8);
  CHECK_THROWS_AS(eval_kernel_derivative(k, 0.0, 0.0), ConfigError);
}

TEST_CASE("kernel matrix structure") {
  const DecayKernel k(0.3, 60.0);
  const TimeGrid g(600.0, 2);
  const Matrix m = build_kernel_matrix(k, g);
  const double dt = 300.0;
  CHECK(m(0, 0) == doctest::Approx(dt * dt));
  CHECK(m(1, 1) == doctest::Approx(dt * dt));
  CHECK(m(0, 1) == doctest::Approx(k(dt) * dt * dt));
  CHECK(m(1, 0) == m(0, 1));
}

TEST_CASE("kernel matrix matches a direct double loop") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const DecayKernel k = testkit::random_kernel(rng);
    const TimeGrid g(testkit::uniform(rng, 600.0, 30000.0), testkit::uniform_int(rng, 2, 40));
    const Matrix m = build_kernel_matrix(k, g);
    const Vector t = g.midpoints();
    for (Eigen::Index a = 0; a < m.rows(); ++a)
      for (Eigen::Index b = 0; b < m.cols(); ++b)
        CHECK(m(a, b) == doctest::Approx(std::pow(1.0 + std::abs(t(a) - t(b)) / k.tau0(), -k.alpha()) * g.dt() * g.dt())
                             .epsilon(1e-12));
  }
}

TEST_CASE("steep kernel tends to a scaled identity") {
  const TimeGrid g(3600.0, 12);
  const Matrix m = build_kernel_matrix(DecayKernel(40.0, 1.0), g);
  const Matrix expected = g.dt() * g.dt() * Matrix::Identity(12, 12);
  CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-12 * g.dt() * g.dt());
}

TEST_CASE("paper kernel matrix is PSD") {
  for (std::size_t bins : {96u, 192u}) {
    const Matrix m = build_kernel_matrix(DecayKernel(0.2, 90.0), TimeGrid(kTradingDaySeconds, bins));
    const PsdCheck c = check_kernel_matrix_psd(m);
    CHECK(c.passed);
    CHECK(c.min_eigenvalue >= -1e-12 * c.trace);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(c.min_eigenvalue));
  }
}

TEST_CASE("kernel norm") {
  const TimeGrid g(kTradingDaySeconds, 8);
  const Matrix m = build_kernel_matrix(DecayKernel(0.2, 90.0), g);
  const Vector flat = Vector::Constant(8, 1.0 / kTradingDaySeconds);
  CHECK(kernel_norm(flat, m) == doctest::Approx(flat.dot(m * flat)));
  CHECK(kernel_norm(2.0 * flat, m) == doctest::Approx(4.0 * kernel_norm(flat, m)));
  CHECK_THROWS_AS(kernel_norm(Vector::Ones(3), m), InputError);
}
