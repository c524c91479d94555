#include "swarmlab/potentials.hpp"

#include "swarmlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace swarmlab {

namespace {

void require_positive_distance(double r) {
  if (!(r > 0.0)) {
    throw DomainError("potential evaluated at non-positive distance r=" + std::to_string(r));
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

InteractionPotential InteractionPotential::power_law(double a, double b) {
  if (!(b > 0.0) || !(a > b) || !std::isfinite(a)) {
    std::ostringstream os;
    os << "power-law potential requires a > b > 0 (got a=" << a << ", b=" << b << ")";
    throw DomainError(os.str());
  }
  return InteractionPotential(PowerLaw{a, b});
}

InteractionPotential InteractionPotential::morse(double c_att, double c_rep, double l_att,
                                                 double l_rep) {
  if (!(c_att > 0.0) || !(c_rep > 0.0) || !(l_att > 0.0) || !(l_rep > 0.0)) {
    throw DomainError("Morse potential requires C_A, C_R, l_A, l_R > 0");
  }
  return InteractionPotential(Morse{c_att, c_rep, l_att, l_rep});
}

const PowerLaw& InteractionPotential::power() const {
  if (const auto* p = std::get_if<PowerLaw>(&kind_)) return *p;
  throw DomainError("operation requires a power-law potential");
}

double InteractionPotential::value(double r) const {
  require_positive_distance(r);
  return std::visit(
      overloaded{
          [r](const PowerLaw& p) { return std::pow(r, p.a) / p.a - std::pow(r, p.b) / p.b; },
          [r](const Morse& m) {
            return m.c_rep * std::exp(-r / m.l_rep) - m.c_att * std::exp(-r / m.l_att);
          }},
      kind_);
}

double InteractionPotential::deriv(double r) const {
  require_positive_distance(r);
  return std::visit(
      overloaded{[r](const PowerLaw& p) { return std::pow(r, p.a - 1.0) - std::pow(r, p.b - 1.0); },
                 [r](const Morse& m) {
                   return m.c_att / m.l_att * std::exp(-r / m.l_att) -
                          m.c_rep / m.l_rep * std::exp(-r / m.l_rep);
                 }},
      kind_);
}

double InteractionPotential::second_deriv(double r) const {
  require_positive_distance(r);
  return std::visit(overloaded{[r](const PowerLaw& p) {
                                 return (p.a - 1.0) * std::pow(r, p.a - 2.0) -
                                        (p.b - 1.0) * std::pow(r, p.b - 2.0);
                               },
                               [r](const Morse& m) {
                                 return m.c_rep / (m.l_rep * m.l_rep) * std::exp(-r / m.l_rep) -
                                        m.c_att / (m.l_att * m.l_att) * std::exp(-r / m.l_att);
                               }},
                    kind_);
}

std::string InteractionPotential::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const PowerLaw& p) { os << "power(a=" << p.a << ",b=" << p.b << ")"; },
                        [&](const Morse& m) {
                          os << "morse(C_A=" << m.c_att << ",C_R=" << m.c_rep << ",l_A=" << m.l_att
                             << ",l_R=" << m.l_rep << ")";
                        }},
             kind_);
  return os.str();
}

double potential_deriv(const InteractionPotential& pot, double r) { return pot.deriv(r); }

double radial_force_factor(const InteractionPotential& pot, double r) { return -pot.deriv(r) / r; }

Vec2 pairwise_force(const InteractionPotential& pot, const Vec2& displacement) {
  const double r = displacement.norm();
  if (r == 0.0) throw DomainError("pairwise_force: zero displacement");
  return pot.deriv(r) / r * displacement;
}

Propulsion Propulsion::make(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw DomainError("propulsion requires alpha > 0 and beta > 0");
  }
  return Propulsion{alpha, beta};
}

Propulsion Propulsion::from_speed(double alpha, double speed) {
  if (!(speed > 0.0)) throw DomainError("asymptotic speed must be positive");
  return make(alpha, alpha / (speed * speed));
}

double Propulsion::asymptotic_speed() const { return std::sqrt(alpha / beta); }

Vec2 propulsion_term(const Propulsion& prop, const Vec2& v) {
  return (prop.alpha - prop.beta * v.squaredNorm()) * v;
}

AlignmentKernel AlignmentKernel::make(double gamma) {
  if (!(gamma > 0.0)) throw DomainError("alignment kernel requires gamma > 0");
  return AlignmentKernel{gamma};
}

double kernel_value(const AlignmentKernel& k, double r) {
  if (!(r >= 0.0)) throw DomainError("kernel evaluated at negative distance");
  return std::pow(1.0 + r * r, -k.gamma);
}

}  // namespace swarmlab
