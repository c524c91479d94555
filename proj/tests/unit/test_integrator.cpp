#include "swarmlab/errors.hpp"
#include "swarmlab/integrator.hpp"

#include <doctest.h>

#include <cmath>

using namespace swarmlab;

namespace {
// |v|^2 = s for a single self-propelled particle: s' = 2 s (alpha - beta s).
double logistic(double t, double s0, double alpha, double beta) {
  const double e = std::exp(2.0 * alpha * t);
  return s0 * e / (1.0 - beta * s0 / alpha + beta * s0 * e / alpha);
}

OdeRhs particle(double alpha, double beta) {
  return [=](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(2);
    const double s = y.squaredNorm();
    dy = (alpha - beta * s) * y;
  };
}

double endpoint_error(double rtol, double atol) {
  Eigen::VectorXd y(2);
  y << 0.5, 0.0;
  IntegratorOptions o;
  o.rtol = rtol;
  o.atol = atol;
  integrate_dp5(particle(1.0, 1.0), 0.0, y, 3.0, {}, [](double, const Eigen::VectorXd&) {}, o);
  return std::abs(y.squaredNorm() - logistic(3.0, 0.25, 1.0, 1.0));
}
}  // namespace

TEST_CASE("single particle relaxes to the asymptotic speed") {
  Eigen::VectorXd y(2);
  y << 0.5, 0.0;
  std::vector<double> ts{0.0, 0.5, 1.0, 2.5, 7.0, 10.0};
  std::vector<double> seen;
  double worst = 0.0;
  integrate_dp5(particle(1.0, 1.0), 0.0, y, 10.0, ts, [&](double t, const Eigen::VectorXd& s) {
    seen.push_back(t);
    worst = std::max(worst, std::abs(s.squaredNorm() - logistic(t, 0.25, 1.0, 1.0)));
  });
  CHECK(seen == ts);
  CHECK(worst < 1e-6);
  CHECK(std::abs(y.norm() - 1.0) < 1e-6);
}

TEST_CASE("error shrinks with the tolerance") {
  const double coarse = endpoint_error(1e-4, 1e-7);
  const double fine = endpoint_error(5e-5, 5e-8);
  const double finer = endpoint_error(1e-8, 1e-11);
  CHECK(fine < coarse);
  CHECK(finer * 2.0 < coarse);
}

TEST_CASE("harmonic oscillator with dense output") {
  OdeRhs f = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(2);
    dy << y[1], -y[0];
  };
  Eigen::VectorXd y(2);
  y << 1.0, 0.0;
  std::vector<double> ts;
  for (int k = 0; k <= 100; ++k) ts.push_back(0.2 * k);
  double worst = 0.0;
  IntegratorOptions o;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  const auto st = integrate_dp5(f, 0.0, y, 20.0, ts, [&](double t, const Eigen::VectorXd& s) {
    worst = std::max(worst, std::abs(s[0] - std::cos(t)));
  }, o);
  CHECK(worst < 1e-7);
  CHECK(st.accepted > 0);
  CHECK(st.evaluations >= 6 * st.accepted);
}

TEST_CASE("rejected steps are recorded") {
  OdeRhs f = [](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(1);
    dy[0] = -50.0 * (y[0] - std::cos(t));
  };
  Eigen::VectorXd y(1);
  y[0] = 0.0;
  IntegratorOptions o;
  o.initial_step = 1.0;
  const auto st = integrate_dp5(f, 0.0, y, 2.0, {}, [](double, const Eigen::VectorXd&) {}, o);
  CHECK(st.rejected > 0);
}

TEST_CASE("integrator errors") {
  Eigen::VectorXd y(1);
  y[0] = 1.0;
  OdeRhs blow = [](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    ds.resize(1);
    ds[0] = s[0] * s[0];
  };
  CHECK_THROWS_AS(integrate_dp5(blow, 0.0, y, 2.0, {}, [](double, const Eigen::VectorXd&) {}), NumericalError);
  y[0] = 1.0;
  CHECK_THROWS_AS(integrate_dp5(blow, 1.0, y, 0.5, {}, [](double, const Eigen::VectorXd&) {}), DomainError);
  CHECK_THROWS_AS(integrate_dp5(blow, 0.0, y, 0.5, {0.3, 0.1}, [](double, const Eigen::VectorXd&) {}), DomainError);
  IntegratorOptions o;
  o.rtol = 0.0;
  CHECK_THROWS_AS(integrate_dp5(blow, 0.0, y, 0.5, {}, [](double, const Eigen::VectorXd&) {}, o), DomainError);
}
