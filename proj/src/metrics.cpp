#include "swarmlab/metrics.hpp"

#include "swarmlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swarmlab {

namespace {

void require_nonempty(const SwarmState& s) {
  if (s.positions.empty()) throw DomainError("metric on an empty state");
  if (s.velocities.size() != s.positions.size()) {
    throw DomainError("state has mismatched position/velocity counts");
  }
}

}  // namespace

Vec2 center_of_mass(const SwarmState& state) {
  require_nonempty(state);
  Vec2 c = Vec2::Zero();
  for (const auto& x : state.positions) c += x;
  return c / static_cast<double>(state.positions.size());
}

double metric_cluster(const SwarmState& state) {
  const Vec2 c = center_of_mass(state);
  const int n = state.size();
  std::vector<double> th(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Vec2 d = state.positions[j] - c;
    th[j] = std::atan2(d.y(), d.x());
  }
  std::sort(th.begin(), th.end());
  std::vector<double> gaps(static_cast<size_t>(n));
  for (int j = 0; j + 1 < n; ++j) gaps[j] = th[j + 1] - th[j];
  gaps[n - 1] = 2.0 * std::numbers::pi + th[0] - th[n - 1];
  std::sort(gaps.begin(), gaps.end());
  const double g0 = 2.0 * std::numbers::pi / n;
  double num = 0.0;
  for (double g : gaps) num += (g - g0) * (g - g0);
  return std::sqrt(num) / (g0 * std::sqrt(static_cast<double>(n)));
}

double metric_fatten(const SwarmState& state, double reference_radius) {
  if (!(reference_radius > 0.0)) throw DomainError("reference radius must be positive");
  const Vec2 c = center_of_mass(state);
  double eta = 0.0;
  for (const auto& x : state.positions) eta += (x - c).norm();
  eta /= state.size();
  return std::abs(eta - reference_radius) / reference_radius;
}

double metric_speed_deviation(const SwarmState& state, double reference_speed) {
  require_nonempty(state);
  if (!(reference_speed > 0.0)) throw DomainError("reference speed must be positive");
  double worst = 0.0;
  for (const auto& v : state.velocities) {
    worst = std::max(worst, std::abs(v.norm() - reference_speed) / reference_speed);
  }
  return worst;
}

double metric_polarization(const SwarmState& state) {
  require_nonempty(state);
  Vec2 sum = Vec2::Zero();
  double mag = 0.0;
  for (const auto& v : state.velocities) {
    sum += v;
    mag += v.norm();
  }
  return mag > 0.0 ? sum.norm() / mag : 0.0;
}

double metric_angular_momentum(const SwarmState& state) {
  const Vec2 c = center_of_mass(state);
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < state.size(); ++j) {
    const Vec2 r = state.positions[j] - c;
    const Vec2& v = state.velocities[j];
    num += r.x() * v.y() - r.y() * v.x();
    den += r.norm() * v.norm();
  }
  return den > 0.0 ? std::abs(num) / den : 0.0;
}

MetricRecord measure(const SwarmState& state, double reference_radius, double reference_speed) {
  MetricRecord r;
  r.t = state.t;
  r.mu_rel = metric_cluster(state);
  r.eta_rel = metric_fatten(state, reference_radius);
  r.speed_dev = metric_speed_deviation(state, reference_speed);
  r.polarization = metric_polarization(state);
  r.angular_momentum = metric_angular_momentum(state);
  return r;
}

std::pair<std::complex<double>, std::complex<double>> mode_coefficients(const SwarmState& state,
                                                                         double radius, int m) {
  if (!(radius > 0.0)) throw DomainError("mode_coefficients: radius must be positive");
  const Vec2 c = center_of_mass(state);
  const int n = state.size();
  std::complex<double> plus = 0.0;
  std::complex<double> minus = 0.0;
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * (j + 1) / n;
    const Vec2 d = state.positions[j] - c;
    const std::complex<double> z(d.x(), d.y());
    const std::complex<double> h = z / (radius * std::polar(1.0, th)) - 1.0;
    plus += h * std::polar(1.0, -m * th);
    minus += h * std::polar(1.0, m * th);
  }
  return {plus / double(n), minus / double(n)};
}

}  // namespace swarmlab
