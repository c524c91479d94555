#pragma once

// Dormand-Prince 5(4) with PI step-size control and the standard fourth-order
// continuous extension for output between steps.

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <vector>

namespace swarmlab {

struct IntegratorOptions {
  double rtol = 1e-6;
  double atol = 1e-9;
  double initial_step = 0.0;  ///< 0 = automatic
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  double last_step = 0.0;
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;
using OdeObserver = std::function<void(double t, const Eigen::VectorXd& y)>;

/// Integrates y from t0 to t1 (t1 > t0), calling observe at each requested
/// sample time (ascending, inside [t0, t1]) with the interpolated state.
/// y holds the state at t1 on return. Throws NumericalError on step underflow
/// (h < 1e-12 * t1), non-finite states, or max_steps exhaustion.
IntegratorStats integrate_dp5(const OdeRhs& rhs, double t0, Eigen::VectorXd& y, double t1,
                              const std::vector<double>& sample_times, const OdeObserver& observe,
                              const IntegratorOptions& opts = {});

}  // namespace swarmlab
