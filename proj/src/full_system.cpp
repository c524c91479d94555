#include "swarmlab/full_system.hpp"

#include "swarmlab/errors.hpp"
#include "swarmlab/linalg.hpp"
#include "swarmlab/rings.hpp"

#include <algorithm>
#include <cmath>

namespace swarmlab {

Eigen::MatrixXd full_hessian(const InteractionPotential& pot, const std::vector<Vec2>& positions) {
  const int n = static_cast<int>(positions.size());
  if (n < 2) throw DomainError("full_hessian: need at least two particles");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      if (l == j) continue;
      const Vec2 x = positions[j] - positions[l];
      const double r = x.norm();
      if (r == 0.0) throw DomainError("full_hessian: coincident particles");
      const Vec2 u = x / r;
      const Eigen::Matrix2d uu = u * u.transpose();
      const Eigen::Matrix2d hw =
          pot.second_deriv(r) * uu + pot.deriv(r) / r * (Eigen::Matrix2d::Identity() - uu);
      h.block<2, 2>(2 * j, 2 * l) = hw / n;
    }
  }
  for (int j = 0; j < n; ++j) {
    Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
    for (int l = 0; l < n; ++l) {
      if (l != j) sum += h.block<2, 2>(2 * j, 2 * l);
    }
    h.block<2, 2>(2 * j, 2 * j) = -sum;
  }
  return h;
}

Eigen::MatrixXd velocity_coupling(int n, const Vec2& direction, double speed) {
  if (n < 1) throw DomainError("velocity_coupling: n must be positive");
  const double len = direction.norm();
  if (!(len > 0.0)) throw DomainError("velocity_coupling: direction must be non-zero");
  const Vec2 u0 = speed * direction / len;
  const Eigen::Matrix2d block = u0 * u0.transpose();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) u.block<2, 2>(2 * j, 2 * j) = block;
  return u;
}

namespace {

Eigen::MatrixXd companion(const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& damping) {
  const Eigen::Index k = hessian.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  l.block(0, k, k, k).setIdentity();
  l.block(k, 0, k, k) = hessian;
  l.block(k, k, k, k) = damping;
  return l;
}

void require_square_even(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols() || h.rows() % 2 != 0 || h.rows() == 0) {
    throw DomainError("jacobian: hessian must be 2N x 2N");
  }
}

}  // namespace

Eigen::MatrixXd full_flock_jacobian(const Eigen::MatrixXd& hessian, const Propulsion& prop,
                                    const Vec2& direction) {
  require_square_even(hessian);
  const int n = static_cast<int>(hessian.rows() / 2);
  const Eigen::MatrixXd u = velocity_coupling(n, direction, prop.asymptotic_speed());
  return companion(hessian, -2.0 * prop.beta * u);
}

Eigen::MatrixXd alignment_operator(const AlignmentKernel& kernel, const std::vector<Vec2>& positions) {
  const int n = static_cast<int>(positions.size());
  if (n < 1) throw DomainError("alignment_operator: no particles");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    for (int l = 0; l < n; ++l) {
      if (l == j) continue;
      const double w = kernel_value(kernel, (positions[j] - positions[l]).norm()) / n;
      diag += w;
      g(2 * j, 2 * l) = -w;
      g(2 * j + 1, 2 * l + 1) = -w;
    }
    g(2 * j, 2 * j) = diag;
    g(2 * j + 1, 2 * j + 1) = diag;
  }
  return g;
}

Eigen::MatrixXd full_cs_jacobian(const Eigen::MatrixXd& hessian, const AlignmentKernel& kernel,
                                 const std::vector<Vec2>& positions) {
  require_square_even(hessian);
  if (static_cast<Eigen::Index>(2 * positions.size()) != hessian.rows()) {
    throw DomainError("full_cs_jacobian: positions do not match hessian size");
  }
  return companion(hessian, -alignment_operator(kernel, positions));
}

TheoremWitness theorem_witness(double a, double b, int n,
                               const std::variant<Propulsion, AlignmentKernel>& velocity_law) {
  if (n < 3 || n > 16) throw DomainError("theorem_witness: n must lie in 3..16");
  const auto pot = InteractionPotential::power_law(a, b);
  const RingSolution ring = flock_ring(pot, n, 0.0);
  const std::vector<Vec2> xs = ring_positions(ring);
  const Eigen::MatrixXd h = full_hessian(pot, xs);

  Eigen::MatrixXd l;
  if (const auto* prop = std::get_if<Propulsion>(&velocity_law)) {
    l = full_flock_jacobian(h, *prop, Vec2(1.0, 0.0));
  } else {
    l = full_cs_jacobian(h, std::get<AlignmentKernel>(velocity_law), xs);
  }

  TheoremWitness w;
  w.mu1 = dense_eigvals_symmetric(h).front();
  const auto ev = dense_eigvals(l);
  w.max_re_L = ev.front().real();
  for (const auto& z : ev) w.max_re_L = std::max(w.max_re_L, z.real());
  w.tol_mu = 1e-6 * std::max(1.0, max_norm(h));
  w.tol_L = 1e-6 * std::max(1.0, max_norm(l));
  w.agree = (w.mu1 > w.tol_mu) == (w.max_re_L > w.tol_L);
  return w;
}

}  // namespace swarmlab
