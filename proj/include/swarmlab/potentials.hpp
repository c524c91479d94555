#pragma once

// Force ingredients shared by the ring solver, the linearizations and the
// particle simulator: radial interaction potentials W(x) = k(|x|), the
// self-propulsion/friction law and the Cucker-Smale communication kernel.

#include <Eigen/Core>

#include <string>
#include <variant>

namespace swarmlab {

using Vec2 = Eigen::Vector2d;

/// k(r) = r^a/a - r^b/b with a > b > 0: repulsive below r = 1, attractive above.
struct PowerLaw {
  double a;
  double b;
};

/// k(r) = C_R exp(-r/l_R) - C_A exp(-r/l_A).
///
/// Sign chosen so that the potential enters the equations of motion through
/// +grad W exactly like the power law (attraction pulls toward distant
/// particles, repulsion dominates at short range when C_R/l_R > C_A/l_A).
struct Morse {
  double c_att;
  double c_rep;
  double l_att;
  double l_rep;
};

class InteractionPotential {
 public:
  /// Throws DomainError unless a > b > 0.
  static InteractionPotential power_law(double a, double b);
  /// Throws DomainError unless all four parameters are strictly positive.
  static InteractionPotential morse(double c_att, double c_rep, double l_att, double l_rep);

  bool is_power_law() const { return std::holds_alternative<PowerLaw>(kind_); }
  /// Throws DomainError for a Morse potential.
  const PowerLaw& power() const;
  const std::variant<PowerLaw, Morse>& kind() const { return kind_; }

  double value(double r) const;
  /// k'(r); r must be positive.
  double deriv(double r) const;
  /// k''(r); r must be positive.
  double second_deriv(double r) const;

  std::string describe() const;

 private:
  explicit InteractionPotential(std::variant<PowerLaw, Morse> k) : kind_(k) {}
  std::variant<PowerLaw, Morse> kind_;
};

/// Derivative of the radial profile, k'(r).
double potential_deriv(const InteractionPotential& pot, double r);

/// f(r) = -k'(r)/r.
double radial_force_factor(const InteractionPotential& pot, double r);

/// grad W(x) = k'(|x|) x/|x|. Zero displacement is a DomainError; regularization
/// is the caller's decision.
Vec2 pairwise_force(const InteractionPotential& pot, const Vec2& displacement);

/// Self-propulsion/friction S(|v|) v = (alpha - beta |v|^2) v.
struct Propulsion {
  double alpha;
  double beta;

  /// Throws DomainError unless alpha > 0 and beta > 0.
  static Propulsion make(double alpha, double beta);
  /// Propulsion with the given alpha and asymptotic speed (beta = alpha/speed^2).
  static Propulsion from_speed(double alpha, double speed);

  double asymptotic_speed() const;
};

Vec2 propulsion_term(const Propulsion& prop, const Vec2& v);

/// g(r) = (1 + r^2)^(-gamma).
struct AlignmentKernel {
  double gamma;

  static AlignmentKernel make(double gamma);
};

double kernel_value(const AlignmentKernel& k, double r);

}  // namespace swarmlab
