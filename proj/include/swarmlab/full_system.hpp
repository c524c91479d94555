#pragma once

// Full 2N/4N-dimensional linearizations about an arbitrary configuration, used
// as the small-N oracle for the reduced mode analysis.

#include "swarmlab/potentials.hpp"

#include <Eigen/Core>

#include <variant>
#include <vector>

namespace swarmlab {

/// 2N x 2N Hessian of the interaction term (1/N) sum_l grad W(x_l - x_j).
/// Off-diagonal block (j,l) = Hess W(x_j - x_l)/N; diagonal blocks make rows sum to zero.
Eigen::MatrixXd full_hessian(const InteractionPotential& pot, const std::vector<Vec2>& positions);

/// Per-particle rank-one block diag(u0 u0^T) with u0 = speed * direction.
Eigen::MatrixXd velocity_coupling(int n, const Vec2& direction, double speed);

/// [[0, I], [M, -2 beta U]], U = diag(u0 u0^T), |u0| = sqrt(alpha/beta).
Eigen::MatrixXd full_flock_jacobian(const Eigen::MatrixXd& hessian, const Propulsion& prop,
                                    const Vec2& direction);

/// (G v)_j = (1/N) sum_l g(|x_j - x_l|)(v_j - v_l).
Eigen::MatrixXd alignment_operator(const AlignmentKernel& kernel, const std::vector<Vec2>& positions);

/// [[0, I], [M, -G]].
Eigen::MatrixXd full_cs_jacobian(const Eigen::MatrixXd& hessian, const AlignmentKernel& kernel,
                                 const std::vector<Vec2>& positions);

struct TheoremWitness {
  double mu1 = 0.0;        ///< largest eigenvalue of the Hessian
  double max_re_L = 0.0;   ///< largest real part of the Jacobian spectrum
  double tol_mu = 0.0;
  double tol_L = 0.0;
  bool agree = false;
};

/// Flock ring of the power law (a, b) with n <= 16 particles, checked with the
/// propulsion or the alignment Jacobian.
TheoremWitness theorem_witness(double a, double b, int n,
                               const std::variant<Propulsion, AlignmentKernel>& velocity_law);

}  // namespace swarmlab
