#include "swarmlab/errors.hpp"
#include "swarmlab/metrics.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <algorithm>

#include <cmath>
#include <numbers>
#include <random>

using namespace swarmlab;

namespace {
SwarmState ring_state(int n, double r, double phase, bool mill) {
  SwarmState s;
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * (j + 1) / n + phase;
    s.positions.emplace_back(r * std::cos(th) + 3.0, r * std::sin(th) - 1.0);
    s.velocities.push_back(mill ? Vec2(-std::sin(th), std::cos(th)) : Vec2(0.6, 0.8));
  }
  return s;
}
}  // namespace

TEST_CASE("perfect rings") {
  for (double phase : {0.0, 0.3, 2.0}) {
    const auto s = ring_state(40, 0.7, phase, false);
    CHECK(metric_cluster(s) < 1e-12);
    CHECK(metric_fatten(s, 0.7) < 1e-12);
    CHECK(metric_polarization(s) == doctest::Approx(1.0));
    CHECK(std::abs(metric_angular_momentum(s)) < 1e-10);
    CHECK(metric_speed_deviation(s, 1.0) < 1e-15);
  }
  const auto m = ring_state(40, 0.7, 0.1, true);
  CHECK(metric_polarization(m) < 1e-12);
  CHECK(metric_angular_momentum(m) == doctest::Approx(1.0));
}

TEST_CASE("three clusters") {
  const int n = 30;
  SwarmState s;
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * (j % 3) / 3.0;
    s.positions.emplace_back(std::cos(th), std::sin(th));
    s.velocities.emplace_back(1.0, 0.0);
  }
  CHECK(metric_cluster(s) == doctest::Approx(std::sqrt(n / 3.0 - 1.0)).epsilon(1e-12));
}

TEST_CASE("cluster metric ignores labels and rotation") {
  std::mt19937_64 rng(9);
  auto s = ring_state(25, 1.0, 0.0, false);
  std::normal_distribution<double> nd(0.0, 0.05);
  for (auto& p : s.positions) p += Vec2(nd(rng), nd(rng));
  const double base = metric_cluster(s);
  auto shuffled = s;
  std::shuffle(shuffled.positions.begin(), shuffled.positions.end(), rng);
  CHECK(metric_cluster(shuffled) == doctest::Approx(base).epsilon(1e-12));
  auto rotated = s;
  const Eigen::Rotation2Dd rot(1.1);
  for (auto& p : rotated.positions) p = rot * p;
  CHECK(metric_cluster(rotated) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("fattening") {
  auto s = ring_state(20, 0.5, 0.0, false);
  CHECK(metric_fatten(s, 0.5 / 1.1) == doctest::Approx(0.1).epsilon(1e-12));
  for (auto& p : s.positions) p = Vec2(3.0, -1.0);
  CHECK(metric_fatten(s, 0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(metric_fatten(s, 0.0), DomainError);
}

TEST_CASE("antipodal mill and resting swarm") {
  SwarmState s;
  s.positions = {Vec2(1, 0), Vec2(-1, 0)};
  s.velocities = {Vec2(0, 1), Vec2(0, -1)};
  CHECK(metric_polarization(s) == 0.0);
  CHECK(metric_angular_momentum(s) == doctest::Approx(1.0));
  s.velocities = {Vec2(0, 0), Vec2(0, 0)};
  CHECK(metric_polarization(s) == 0.0);
}

TEST_CASE("measure and mode coefficients") {
  const int n = 64, m = 3;
  const double r = 0.8;
  const std::complex<double> xp(1e-3, 2e-4), xm(-5e-4, 0.0);
  SwarmState s;
  for (int j = 1; j <= n; ++j) {
    const double th = 2.0 * std::numbers::pi * j / n;
    const auto h = xp * std::polar(1.0, m * th) + xm * std::polar(1.0, -m * th);
    const auto z = r * std::polar(1.0, th) * (1.0 + h);
    s.positions.emplace_back(z.real(), z.imag());
    s.velocities.emplace_back(1.0, 0.0);
  }
  const auto [cp, cm] = mode_coefficients(s, r, m);
  CHECK(std::abs(cp - xp) < 1e-15);
  CHECK(std::abs(cm - xm) < 1e-15);
  const auto rec = measure(s, r, 1.0);
  CHECK(rec.polarization == doctest::Approx(1.0));
  CHECK(rec.speed_dev == 0.0);
}
