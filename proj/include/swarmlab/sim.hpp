#pragma once

// Direct particle simulation of the self-propelled model and the Cucker-Smale
// model, ring initial conditions and parameter sweeps.

#include "swarmlab/integrator.hpp"
#include "swarmlab/metrics.hpp"
#include "swarmlab/potentials.hpp"
#include "swarmlab/rings.hpp"
#include "swarmlab/state.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace swarmlab {

enum class SimModel { Propulsion, CuckerSmale };

struct SimConfig {
  SimModel model = SimModel::Propulsion;
  InteractionPotential potential = InteractionPotential::power_law(2.0, 1.0);
  Propulsion propulsion{1.0, 1.0};
  AlignmentKernel alignment{1.0};
  int n = 0;
  double t_final = 1.0;
  double rtol = 1e-6;
  double atol = 1e-9;
  std::uint64_t seed = 0;
  double sample_every = 0.0;         ///< 0: sample only the endpoints
  double min_distance_guard = 0.0;   ///< 0: 1e-9 times the reference radius
  int workers = 0;                   ///< force-loop threads; 0 = default
  bool keep_trajectory = false;
};

void validate(const SimConfig& config);

struct Derivative {
  std::vector<Vec2> dx;
  std::vector<Vec2> dv;
};

/// Time derivative of the state. Throws GuardViolation when two particles are
/// closer than the guard distance (guard <= 0 uses config.min_distance_guard).
Derivative rhs(const SwarmState& state, const SimConfig& config, double guard = 0.0);

struct MetricReference {
  double radius = 1.0;
  double speed = 1.0;
};

struct SimResult {
  std::vector<SwarmState> trajectory;  ///< samples, only with keep_trajectory
  std::vector<MetricRecord> metrics;
  SwarmState final_state;
  IntegratorStats stats;
  double guard = 0.0;
  MetricReference reference;
};

/// Without a reference the radius is the initial mean distance from the centre
/// of mass and the speed is sqrt(alpha/beta) (propulsion) or the initial mean
/// speed (Cucker-Smale).
SimResult integrate(const SimConfig& config, const SwarmState& initial,
                    std::optional<MetricReference> reference = std::nullopt);

struct NoPerturbation {};

/// h_j = xi+ e^{i m theta_j} + xi- e^{-i m theta_j} applied as x_j = R e^{i theta_j}(1 + h_j).
struct ModePerturbation {
  int m = 2;
  std::complex<double> xi_plus = 0.0;
  std::complex<double> xi_minus = 0.0;
};

/// Gaussian displacements and velocity kicks, centred to zero mean.
struct RandomNoise {
  double sigma_pos = 0.0;
  double sigma_vel = 0.0;
};

using PerturbationSpec = std::variant<NoPerturbation, ModePerturbation, RandomNoise>;

SwarmState ic_flock_ring(const RingSolution& ring, const Vec2& direction,
                         const PerturbationSpec& perturbation = NoPerturbation{},
                         std::uint64_t seed = 0);

/// orientation +1 rotates counter-clockwise, -1 clockwise.
SwarmState ic_mill_ring(const RingSolution& ring, int orientation,
                        const PerturbationSpec& perturbation = NoPerturbation{},
                        std::uint64_t seed = 0);

enum class SweepParameter { B, Speed };
enum class IcKind { Flock, Mill };
enum class SweepMetric { Cluster, Fatten };

struct SweepSpec {
  SimConfig base;
  SweepParameter parameter = SweepParameter::B;
  std::vector<double> values;
  IcKind ic = IcKind::Flock;
  PerturbationSpec perturbation = NoPerturbation{};
  SweepMetric metric = SweepMetric::Cluster;
  double speed = 1.0;    ///< ring speed for the Cucker-Smale model
  int orientation = 1;   ///< mill initial conditions
};

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  double radius = 0.0;
  double metric = 0.0;
  MetricRecord final_metrics;
};

/// Configuration and initial state of run i of a sweep.
std::pair<SimConfig, SwarmState> sweep_run_setup(const SweepSpec& spec, size_t i, RingSolution* ring);

/// Independent runs per value, seeds base_seed + index, parallel across values.
std::vector<SweepRow> bifurcation_sweep(const SweepSpec& spec, int workers = 0);

}  // namespace swarmlab
