#include "swarmlab/rings.hpp"

#include "swarmlab/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace swarmlab {

namespace {

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void require_ring_count(int n) {
  if (n < 3) throw DomainError("ring needs at least 3 particles (n=" + std::to_string(n) + ")");
}

// Generic residual: (1/N) sum_p sin(p pi/N) k'(2R sin(p pi/N)) - speed^2/R.
double generic_residual(const RadiusProblem& pr, double radius) {
  Kahan acc;
  for (int p = 1; p < pr.n; ++p) {
    const double s = std::sin(std::numbers::pi * p / pr.n);
    acc.add(s * pr.potential.deriv(2.0 * radius * s));
  }
  return acc.sum / pr.n - pr.speed * pr.speed / radius;
}

struct PowerResidual {
  double a, b, s_a, s_b, speed2;

  double operator()(double r) const {
    return std::pow(2.0 * r, a - 1.0) * s_a - std::pow(2.0 * r, b - 1.0) * s_b - speed2 / r;
  }
  double deriv(double r) const {
    return 2.0 * (a - 1.0) * std::pow(2.0 * r, a - 2.0) * s_a -
           2.0 * (b - 1.0) * std::pow(2.0 * r, b - 2.0) * s_b + speed2 / (r * r);
  }
};

PowerResidual power_residual(const RadiusProblem& pr) {
  const auto& p = pr.potential.power();
  return PowerResidual{p.a, p.b, trig_moment(pr.n, p.a), trig_moment(pr.n, p.b),
                       pr.speed * pr.speed};
}

template <class F>
double bisect(const F& f, double lo, double hi, double flo, double tol) {
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

RingSolution make_ring(int n, double radius, double speed) {
  RingSolution ring;
  ring.n = n;
  ring.radius = radius;
  ring.speed = speed;
  ring.kind = speed > 0.0 ? RingKind::Mill : RingKind::Flock;
  ring.omega = speed > 0.0 ? speed / radius : 0.0;
  return ring;
}

void check_problem(const RadiusProblem& pr) {
  require_ring_count(pr.n);
  if (!(pr.speed >= 0.0)) throw DomainError("ring speed must be non-negative");
  if (!(pr.tolerance > 0.0)) throw DomainError("radius tolerance must be positive");
  if (pr.bracket && !(pr.bracket->first > 0.0 && pr.bracket->first < pr.bracket->second)) {
    throw DomainError("radius bracket must satisfy 0 < lo < hi");
  }
}

}  // namespace

double trig_moment(int n, double alpha) {
  require_ring_count(n);
  if (!(alpha >= 0.0)) throw DomainError("trig_moment exponent must be non-negative");
  Kahan acc;
  for (int p = 0; p < n; ++p) {
    const double s = std::sin(std::numbers::pi * p / n);
    acc.add(p == 0 ? (alpha == 0.0 ? 1.0 : 0.0) : std::pow(s, alpha));
  }
  return acc.sum / n;
}

double radius_residual(const RadiusProblem& problem, double radius) {
  check_problem(problem);
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  if (problem.potential.is_power_law()) return power_residual(problem)(radius);
  return generic_residual(problem, radius);
}

RingSolution solve_radius(const RadiusProblem& problem) {
  check_problem(problem);
  if (!problem.potential.is_power_law()) {
    if (!problem.bracket) throw DomainError("non-power-law radius solve needs an explicit bracket");
    auto f = [&](double r) { return generic_residual(problem, r); };
    const double lo = problem.bracket->first;
    const double hi = problem.bracket->second;
    const double flo = f(lo);
    const double fhi = f(hi);
    if ((flo < 0.0) == (fhi < 0.0)) {
      throw NumericalError("solve_radius: no sign change in the given bracket");
    }
    return make_ring(problem.n, bisect(f, lo, hi, flo, problem.tolerance), problem.speed);
  }

  const PowerResidual f = power_residual(problem);
  double lo = problem.bracket ? problem.bracket->first : 1e-6;
  double hi = problem.bracket ? problem.bracket->second : 1e3;
  double flo = f(lo);
  double fhi = f(hi);
  // Below the root the residual is negative, above it positive (unique root).
  for (int k = 0; k < 30 && flo >= 0.0; ++k) {
    lo *= 0.1;
    flo = f(lo);
  }
  for (int k = 0; k < 30 && fhi <= 0.0; ++k) {
    hi *= 10.0;
    fhi = f(hi);
  }
  if (!(flo < 0.0 && fhi > 0.0) || !std::isfinite(flo) || !std::isfinite(fhi)) {
    std::ostringstream os;
    os << "solve_radius: could not bracket the ring radius for " << problem.potential.describe();
    throw NumericalError(os.str());
  }
  double r = bisect(f, lo, hi, flo, problem.tolerance);
  for (int k = 0; k < 2; ++k) {
    const double d = f.deriv(r);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double next = r - f(r) / d;
    if (next > lo && next < hi && std::abs(f(next)) <= std::abs(f(r))) r = next;
  }
  return make_ring(problem.n, r, problem.speed);
}

std::vector<RingSolution> solve_radius_all(const RadiusProblem& problem, int subintervals) {
  check_problem(problem);
  if (!problem.bracket) throw DomainError("solve_radius_all needs an explicit bracket");
  if (subintervals < 1) throw DomainError("subintervals must be positive");
  auto f = [&](double r) { return radius_residual(problem, r); };
  const double lo = problem.bracket->first;
  const double hi = problem.bracket->second;
  std::vector<RingSolution> roots;
  double x0 = lo;
  double f0 = f(x0);
  for (int k = 1; k <= subintervals; ++k) {
    const double x1 = lo + (hi - lo) * k / subintervals;
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(make_ring(problem.n, x0, problem.speed));
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      roots.push_back(make_ring(problem.n, bisect(f, x0, x1, f0, problem.tolerance), problem.speed));
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) roots.push_back(make_ring(problem.n, x0, problem.speed));
  return roots;
}

RingSolution flock_ring(const InteractionPotential& pot, int n, double speed) {
  RingSolution ring = solve_radius(RadiusProblem{pot, n, 0.0, std::nullopt, 1e-12});
  ring.speed = speed;
  ring.kind = RingKind::Flock;
  ring.omega = 0.0;
  return ring;
}

RingSolution mill_ring(const InteractionPotential& pot, int n, double speed) {
  RingSolution ring = solve_radius(RadiusProblem{pot, n, speed, std::nullopt, 1e-12});
  ring.kind = RingKind::Mill;
  return ring;
}

double beta_fn(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("beta function needs positive arguments");
  if (x + y < 150.0) return std::tgamma(x) * std::tgamma(y) / std::tgamma(x + y);
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

double psi_one(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("psi_one needs alpha > 0");
  return std::pow(2.0, alpha - 1.0) / std::numbers::pi * beta_fn((alpha + 1.0) / 2.0, 0.5);
}

double continuum_radius(double a, double b, double speed) {
  if (!(b > 0.0) || !(a > b)) throw DomainError("continuum radius requires a > b > 0");
  if (!(speed >= 0.0)) throw DomainError("speed must be non-negative");
  if (speed == 0.0) {
    return 0.5 * std::pow(beta_fn((b + 1.0) / 2.0, 0.5) / beta_fn((a + 1.0) / 2.0, 0.5),
                          1.0 / (a - b));
  }
  const double pa = psi_one(a);
  const double pb = psi_one(b);
  const double s2 = speed * speed;
  auto f = [&](double r) { return pa * std::pow(r, a - 1.0) - pb * std::pow(r, b - 1.0) - s2 / r; };
  double lo = 1e-6;
  double hi = 1e3;
  while (f(lo) >= 0.0 && lo > 1e-300) lo *= 0.1;
  while (f(hi) <= 0.0 && hi < 1e300) hi *= 10.0;
  return bisect(f, lo, hi, f(lo), 1e-15);
}

std::vector<Vec2> ring_positions(const RingSolution& ring) {
  require_ring_count(ring.n);
  std::vector<Vec2> xs(ring.n);
  for (int j = 1; j <= ring.n; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / ring.n;
    xs[j - 1] = ring.radius * Vec2(std::cos(theta), std::sin(theta));
  }
  return xs;
}

}  // namespace swarmlab
