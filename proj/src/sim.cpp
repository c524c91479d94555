#include "swarmlab/sim.hpp"

#include "swarmlab/errors.hpp"
#include "swarmlab/workers.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace swarmlab {

namespace {

struct Forces {
  const SimConfig& cfg;
  int n;
  double guard;
  int threads;
  bool power;
  double ea = 0.0;  // (a-2)/2
  double eb = 0.0;  // (b-2)/2

  Forces(const SimConfig& c, int count, double g)
      : cfg(c), n(count), guard(g), threads(resolve_workers(c.workers)),
        power(c.potential.is_power_law()) {
    if (power) {
      ea = 0.5 * (c.potential.power().a - 2.0);
      eb = 0.5 * (c.potential.power().b - 2.0);
    }
  }

  // k'(r)/r from r^2.
  double factor(double r2) const {
    if (power) {
      const double lr = std::log(r2);
      return std::exp(ea * lr) - std::exp(eb * lr);
    }
    const double r = std::sqrt(r2);
    return cfg.potential.deriv(r) / r;
  }

  // x: 2n positions, v: 2n velocities, acc: 2n output.
  void accel(const double* x, const double* v, double* acc) const {
    const double inv_n = 1.0 / n;
    const double guard2 = guard * guard;
    const bool cs = cfg.model == SimModel::CuckerSmale;
    const double gamma = cfg.alignment.gamma;
    const double alpha = cfg.propulsion.alpha;
    const double beta = cfg.propulsion.beta;
    int bad_j = -1;
    int bad_l = -1;
    double bad_r = 0.0;
#pragma omp parallel for schedule(static) num_threads(threads) if (n >= 64)
    for (int j = 0; j < n; ++j) {
      const double xj = x[2 * j];
      const double yj = x[2 * j + 1];
      const double vxj = v[2 * j];
      const double vyj = v[2 * j + 1];
      double fx = 0.0;
      double fy = 0.0;
      double ax = 0.0;
      double ay = 0.0;
      for (int l = 0; l < n; ++l) {
        if (l == j) continue;
        const double dx = x[2 * l] - xj;
        const double dy = x[2 * l + 1] - yj;
        const double r2 = dx * dx + dy * dy;
        if (!(r2 >= guard2)) {
#pragma omp critical(swarmlab_guard)
          {
            if (bad_j < 0 || j < bad_j) {
              bad_j = j;
              bad_l = l;
              bad_r = std::sqrt(r2);
            }
          }
          break;
        }
        const double f = factor(r2);
        fx += f * dx;
        fy += f * dy;
        if (cs) {
          const double g = std::pow(1.0 + r2, -gamma);
          ax += g * (v[2 * l] - vxj);
          ay += g * (v[2 * l + 1] - vyj);
        }
      }
      if (cs) {
        acc[2 * j] = (fx + ax) * inv_n;
        acc[2 * j + 1] = (fy + ay) * inv_n;
      } else {
        const double s = alpha - beta * (vxj * vxj + vyj * vyj);
        acc[2 * j] = s * vxj + fx * inv_n;
        acc[2 * j + 1] = s * vyj + fy * inv_n;
      }
    }
    if (bad_j >= 0) {
      std::ostringstream os;
      os << "particles " << bad_j << " and " << bad_l << " closer than the guard distance " << guard
         << " (distance " << bad_r << ")";
      throw GuardViolation(os.str(), bad_j, bad_l, bad_r);
    }
  }
};

Eigen::VectorXd pack(const SwarmState& s) {
  const int n = s.size();
  Eigen::VectorXd y(4 * n);
  for (int j = 0; j < n; ++j) {
    y[2 * j] = s.positions[j].x();
    y[2 * j + 1] = s.positions[j].y();
    y[2 * n + 2 * j] = s.velocities[j].x();
    y[2 * n + 2 * j + 1] = s.velocities[j].y();
  }
  return y;
}

SwarmState unpack(double t, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size() / 4);
  SwarmState s;
  s.t = t;
  s.positions.resize(n);
  s.velocities.resize(n);
  for (int j = 0; j < n; ++j) {
    s.positions[j] = Vec2(y[2 * j], y[2 * j + 1]);
    s.velocities[j] = Vec2(y[2 * n + 2 * j], y[2 * n + 2 * j + 1]);
  }
  return s;
}

void check_state(const SwarmState& s, const SimConfig& cfg) {
  if (s.positions.size() != s.velocities.size()) {
    throw DomainError("state has mismatched position/velocity counts");
  }
  if (s.size() != cfg.n) {
    throw DomainError("state size " + std::to_string(s.size()) + " does not match config n=" +
                      std::to_string(cfg.n));
  }
  for (int j = 0; j < s.size(); ++j) {
    if (!s.positions[j].allFinite() || !s.velocities[j].allFinite()) {
      throw DomainError("state has non-finite entries");
    }
  }
}

double mean_radius(const SwarmState& s) {
  const Vec2 c = center_of_mass(s);
  double r = 0.0;
  for (const auto& x : s.positions) r += (x - c).norm();
  return r / s.size();
}

double mean_speed(const SwarmState& s) {
  double v = 0.0;
  for (const auto& u : s.velocities) v += u.norm();
  return v / s.size();
}

std::complex<double> to_c(const Vec2& v) { return {v.x(), v.y()}; }
Vec2 to_v(std::complex<double> z) { return {z.real(), z.imag()}; }

// Applies the perturbation in place. Positions are the unperturbed ring.
void perturb(SwarmState& s, const RingSolution& ring, const PerturbationSpec& p,
             std::uint64_t seed) {
  const int n = s.size();
  if (const auto* mode = std::get_if<ModePerturbation>(&p)) {
    if (mode->m < 2) throw DomainError("mode perturbation needs m >= 2");
    if (mode->m % n == 0) throw DomainError("mode perturbation m must not be a multiple of N");
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + 1) / n;
      const std::complex<double> h =
          mode->xi_plus * std::polar(1.0, mode->m * th) + mode->xi_minus * std::polar(1.0, -mode->m * th);
      s.positions[j] = to_v(ring.radius * std::polar(1.0, th) * (1.0 + h));
    }
  } else if (const auto* noise = std::get_if<RandomNoise>(&p)) {
    if (!(noise->sigma_pos >= 0.0) || !(noise->sigma_vel >= 0.0)) {
      throw DomainError("noise amplitudes must be non-negative");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec2> dx(n), dv(n);
    Vec2 mx = Vec2::Zero(), mv = Vec2::Zero();
    for (int j = 0; j < n; ++j) {
      dx[j] = noise->sigma_pos * Vec2(normal(rng), normal(rng));
      dv[j] = noise->sigma_vel * Vec2(normal(rng), normal(rng));
      mx += dx[j];
      mv += dv[j];
    }
    mx /= n;
    mv /= n;
    for (int j = 0; j < n; ++j) {
      s.positions[j] += dx[j] - mx;
      s.velocities[j] += dv[j] - mv;
    }
  }
}

}  // namespace

void validate(const SimConfig& c) {
  if (c.n < 1) throw DomainError("simulation needs n >= 1");
  if (!(c.t_final > 0.0)) throw DomainError("t_final must be positive");
  if (!(c.rtol > 0.0) || !(c.atol > 0.0)) throw DomainError("tolerances must be positive");
  if (!(c.sample_every >= 0.0)) throw DomainError("sample_every must be non-negative");
  if (!(c.min_distance_guard >= 0.0)) throw DomainError("min_distance_guard must be non-negative");
  if (c.model == SimModel::Propulsion) {
    Propulsion::make(c.propulsion.alpha, c.propulsion.beta);
  } else {
    AlignmentKernel::make(c.alignment.gamma);
  }
}

Derivative rhs(const SwarmState& state, const SimConfig& config, double guard) {
  validate(config);
  check_state(state, config);
  const int n = state.size();
  if (!(guard > 0.0)) guard = config.min_distance_guard;
  const Eigen::VectorXd y = pack(state);
  Eigen::VectorXd acc(2 * n);
  Forces(config, n, guard).accel(y.data(), y.data() + 2 * n, acc.data());
  Derivative d;
  d.dx = state.velocities;
  d.dv.resize(n);
  for (int j = 0; j < n; ++j) d.dv[j] = Vec2(acc[2 * j], acc[2 * j + 1]);
  return d;
}

SimResult integrate(const SimConfig& config, const SwarmState& initial,
                    std::optional<MetricReference> reference) {
  validate(config);
  check_state(initial, config);
  const int n = config.n;

  SimResult res;
  if (reference) {
    res.reference = *reference;
  } else {
    res.reference.radius = mean_radius(initial);
    res.reference.speed = config.model == SimModel::Propulsion ? config.propulsion.asymptotic_speed()
                                                               : mean_speed(initial);
  }
  if (!(res.reference.radius > 0.0)) res.reference.radius = 1.0;
  if (!(res.reference.speed > 0.0)) res.reference.speed = 1.0;
  res.guard = config.min_distance_guard > 0.0 ? config.min_distance_guard : 1e-9 * res.reference.radius;

  const Forces forces(config, n, res.guard);
  OdeRhs f = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(y.size());
    dy.head(2 * n) = y.tail(2 * n);
    forces.accel(y.data(), y.data() + 2 * n, dy.data() + 2 * n);
  };

  const double t0 = initial.t;
  const double t1 = t0 + config.t_final;
  std::vector<double> samples{t0};
  if (config.sample_every > 0.0) {
    for (long k = 1;; ++k) {
      const double t = t0 + k * config.sample_every;
      if (t >= t1 * (1.0 - 1e-14)) break;
      samples.push_back(t);
    }
  }
  samples.push_back(t1);

  OdeObserver observe = [&](double t, const Eigen::VectorXd& y) {
    SwarmState s = unpack(t, y);
    res.metrics.push_back(measure(s, res.reference.radius, res.reference.speed));
    if (config.keep_trajectory) res.trajectory.push_back(std::move(s));
  };

  Eigen::VectorXd y = pack(initial);
  IntegratorOptions opts;
  opts.rtol = config.rtol;
  opts.atol = config.atol;
  res.stats = integrate_dp5(f, t0, y, t1, samples, observe, opts);
  res.final_state = unpack(t1, y);
  return res;
}

SwarmState ic_flock_ring(const RingSolution& ring, const Vec2& direction,
                         const PerturbationSpec& perturbation, std::uint64_t seed) {
  const double len = direction.norm();
  if (!(len > 0.0)) throw DomainError("flock direction must be non-zero");
  SwarmState s;
  s.positions = ring_positions(ring);
  s.velocities.assign(s.positions.size(), ring.speed * direction / len);
  perturb(s, ring, perturbation, seed);
  return s;
}

SwarmState ic_mill_ring(const RingSolution& ring, int orientation,
                        const PerturbationSpec& perturbation, std::uint64_t seed) {
  if (orientation != 1 && orientation != -1) throw DomainError("mill orientation must be +1 or -1");
  SwarmState s;
  s.positions = ring_positions(ring);
  s.velocities.resize(s.positions.size());
  for (int j = 0; j < ring.n; ++j) {
    const double th = 2.0 * std::numbers::pi * (j + 1) / ring.n;
    s.velocities[j] = orientation * ring.speed * Vec2(-std::sin(th), std::cos(th));
  }
  perturb(s, ring, perturbation, seed);
  return s;
}

std::pair<SimConfig, SwarmState> sweep_run_setup(const SweepSpec& spec, size_t i, RingSolution* ring_out) {
  if (i >= spec.values.size()) throw DomainError("sweep index out of range");
  SimConfig cfg = spec.base;
  const double value = spec.values[i];
  cfg.seed = spec.base.seed + i;
  double speed = cfg.model == SimModel::Propulsion ? cfg.propulsion.asymptotic_speed() : spec.speed;
  if (spec.parameter == SweepParameter::B) {
    const double a = spec.base.potential.power().a;
    cfg.potential = InteractionPotential::power_law(a, value);
  } else {
    if (!(value > 0.0)) throw DomainError("swept speed must be positive");
    speed = value;
    if (cfg.model == SimModel::Propulsion) {
      cfg.propulsion = Propulsion::from_speed(cfg.propulsion.alpha, value);
    }
  }
  const RingSolution ring = spec.ic == IcKind::Mill ? mill_ring(cfg.potential, cfg.n, speed)
                                                    : flock_ring(cfg.potential, cfg.n, speed);
  if (ring_out) *ring_out = ring;
  SwarmState s = spec.ic == IcKind::Mill
                     ? ic_mill_ring(ring, spec.orientation, spec.perturbation, cfg.seed)
                     : ic_flock_ring(ring, Vec2(1.0, 0.0), spec.perturbation, cfg.seed);
  return {cfg, s};
}

std::vector<SweepRow> bifurcation_sweep(const SweepSpec& spec, int workers) {
  if (spec.values.empty()) throw DomainError("sweep needs at least one value");
  validate(spec.base);
  const int threads = resolve_workers(workers);
  const int count = static_cast<int>(spec.values.size());
  std::vector<SweepRow> rows(spec.values.size());
  std::vector<std::string> errors(spec.values.size());
  std::vector<char> numerical(spec.values.size(), 0);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    try {
      RingSolution ring;
      auto [cfg, ic] = sweep_run_setup(spec, static_cast<size_t>(i), &ring);
      if (count > 1) cfg.workers = 1;
      const SimResult r = integrate(cfg, ic, MetricReference{ring.radius, ring.speed});
      SweepRow row;
      row.value = spec.values[i];
      row.seed = cfg.seed;
      row.radius = ring.radius;
      row.final_metrics = r.metrics.back();
      row.metric = spec.metric == SweepMetric::Cluster ? row.final_metrics.mu_rel
                                                       : row.final_metrics.eta_rel;
      rows[i] = row;
    } catch (const NumericalError& e) {
      errors[i] = e.what();
      numerical[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) continue;
    std::ostringstream os;
    os << "sweep value " << spec.values[i] << ": " << errors[i];
    if (numerical[i]) throw NumericalError(os.str());
    throw DomainError(os.str());
  }
  return rows;
}

}  // namespace swarmlab
