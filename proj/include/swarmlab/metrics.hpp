#pragma once

// Order parameters for particle snapshots. All are dimensionless.

#include "swarmlab/rings.hpp"
#include "swarmlab/state.hpp"

#include <complex>

namespace swarmlab {

Vec2 center_of_mass(const SwarmState& state);

/// Relative deviation of the sorted angular gaps (about the centre of mass)
/// from the uniform gap 2 pi / N.
double metric_cluster(const SwarmState& state);

/// |mean_j |x_j - xbar| - R| / R.
double metric_fatten(const SwarmState& state, double reference_radius);

/// max_j ||v_j| - s| / s.
double metric_speed_deviation(const SwarmState& state, double reference_speed);

/// |sum v| / sum |v|; 0 when all particles are at rest.
double metric_polarization(const SwarmState& state);

/// |sum (x - xbar)^perp . v| / sum |x - xbar||v|.
double metric_angular_momentum(const SwarmState& state);

struct MetricRecord {
  double t = 0.0;
  double mu_rel = 0.0;
  double eta_rel = 0.0;
  double speed_dev = 0.0;
  double polarization = 0.0;
  double angular_momentum = 0.0;
};

MetricRecord measure(const SwarmState& state, double reference_radius, double reference_speed);

/// Mode coefficients (xi+, xi-) of the radial/tangential deformation
/// h_j = (x_j - xbar)/(R e^{i theta_j}) - 1 with theta_j = 2 pi j / N.
std::pair<std::complex<double>, std::complex<double>> mode_coefficients(const SwarmState& state,
                                                                         double radius, int m);

}  // namespace swarmlab
