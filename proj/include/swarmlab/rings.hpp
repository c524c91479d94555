#pragma once

// Flock and mill rings: N particles equally spaced on a circle of radius R.
// The radius balances attraction, repulsion and (for mills) the centrifugal
// term speed^2/R; the same equation covers both with speed = 0 for flocks.

#include "swarmlab/potentials.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace swarmlab {

enum class RingKind { Flock, Mill };

struct RingSolution {
  int n = 0;
  double radius = 0.0;
  double speed = 0.0;  ///< asymptotic speed |u0|
  double omega = 0.0;  ///< speed/radius for mills, 0 for flocks
  RingKind kind = RingKind::Flock;
};

struct RadiusProblem {
  InteractionPotential potential;
  int n;
  double speed = 0.0;  ///< centrifugal term; 0 for flocks
  std::optional<std::pair<double, double>> bracket;
  double tolerance = 1e-12;
};

/// S_alpha = (1/N) sum_{p=0}^{N-1} sin^alpha(p pi/N), compensated summation in index order.
double trig_moment(int n, double alpha);

/// Residual of the ring condition at radius R (zero at a ring).
double radius_residual(const RadiusProblem& problem, double radius);

/// Unique root for power laws (bracket auto-expanded from (1e-6, 1e3)); Morse
/// requires an explicit bracket. Throws NumericalError when no sign change is found.
/// Returns a Mill ring when speed > 0, a Flock ring otherwise.
RingSolution solve_radius(const RadiusProblem& problem);

/// All sign-change roots in the explicit bracket, ascending. Empty when none.
std::vector<RingSolution> solve_radius_all(const RadiusProblem& problem, int subintervals = 1024);

/// Flock ring for model (1): radius solved without centrifugal term, speed kept as metadata.
RingSolution flock_ring(const InteractionPotential& pot, int n, double speed);
/// Mill ring rotating at omega = speed/R.
RingSolution mill_ring(const InteractionPotential& pot, int n, double speed);

double beta_fn(double x, double y);

/// psi_alpha(1) = 2^(alpha-1)/pi * B((alpha+1)/2, 1/2).
double psi_one(double alpha);

/// N -> infinity limit of the ring radius for the power law (a, b).
double continuum_radius(double a, double b, double speed);

/// R (cos theta_j, sin theta_j), theta_j = 2 pi j / N, j = 1..N.
std::vector<Vec2> ring_positions(const RingSolution& ring);

}  // namespace swarmlab
