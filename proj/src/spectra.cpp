#include "swarmlab/spectra.hpp"

#include "swarmlab/errors.hpp"
#include "swarmlab/mode_sums.hpp"
#include "swarmlab/rings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <numbers>
#include <sstream>

namespace swarmlab {

namespace {

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  double abs_sum = 0.0;
  void add(double x) {
    abs_sum += std::abs(x);
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void require_power(double a, double b) {
  if (!(b > 0.0) || !(a > b)) {
    std::ostringstream os;
    os << "mode analysis requires a power law with a > b > 0 (got a=" << a << ", b=" << b << ")";
    throw DomainError(os.str());
  }
}

void require_ring(double radius, int n) {
  if (n < 3) throw DomainError("mode analysis requires n >= 3");
  if (!(radius > 0.0)) throw DomainError("mode analysis requires a positive radius");
}

double chord(double radius, int p, int n) {
  const int q = p <= n - p ? p : n - p;
  return 2.0 * radius * std::sin(std::numbers::pi * q / n);
}

// cos and sin of 2 pi p k / N with the angle reduced exactly.
std::pair<double, double> unit_root(long long p, long long k, int n) {
  long long q = (p * k) % n;
  if (q < 0) q += n;
  const double th = 2.0 * std::numbers::pi * static_cast<double>(q) / n;
  return {std::cos(th), std::sin(th)};
}

void check_imaginary(const Kahan& re, const Kahan& im, const char* what) {
  const double bound = 1e-10 * std::abs(re.sum) + 1e-14 + 1e-12 * im.abs_sum;
  if (std::abs(im.sum) > bound) {
    std::ostringstream os;
    os << what << ": imaginary part " << im.sum << " is not negligible (real part " << re.sum << ")";
    throw NumericalError(os.str());
  }
}

double flock_radius(double a, double b, int n) {
  return flock_ring(InteractionPotential::power_law(a, b), n, 0.0).radius;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Flock: return "flock";
    case ModelKind::FlockCS: return "flock-cs";
    case ModelKind::Mill: return "mill";
  }
  return "?";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Stable: return "stable";
    case Classification::Unstable: return "unstable";
    case Classification::Marginal: return "marginal";
    case Classification::Invalid: return "invalid";
  }
  return "?";
}

ModelKind parse_model(const std::string& name) {
  if (name == "flock") return ModelKind::Flock;
  if (name == "flock-cs" || name == "cs") return ModelKind::FlockCS;
  if (name == "mill") return ModelKind::Mill;
  throw DomainError("unknown model '" + name + "' (expected flock, flock-cs or mill)");
}

Eigen::Matrix2d ShapeMatrix::matrix() const {
  Eigen::Matrix2d m;
  m << i1_plus, i2, i2, i1_minus;
  return m;
}

std::pair<double, double> g1_g2(double a, double b, double radius, int n, int p) {
  require_power(a, b);
  require_ring(radius, n);
  if (p < 1 || p > n - 1) throw DomainError("g1_g2: index p must lie in 1..N-1");
  const double d = chord(radius, p, n);
  const double da = std::pow(d, a - 2.0);
  const double db = std::pow(d, b - 2.0);
  const double s = 1.0 / (2.0 * n);
  return {s * (-a * da + b * db), s * (-(a - 2.0) * da + (b - 2.0) * db)};
}

double i1(double a, double b, double radius, int n, int m) {
  require_power(a, b);
  require_ring(radius, n);
  Kahan re;
  Kahan im;
  for (int p = 1; p < n; ++p) {
    const double g = g1_g2(a, b, radius, n, p).first;
    const auto [c, s] = unit_root(p, static_cast<long long>(m) + 1, n);
    re.add(g * (1.0 - c));
    im.add(-g * s);
  }
  check_imaginary(re, im, "i1");
  return re.sum;
}

double i2(double a, double b, double radius, int n, int m) {
  require_power(a, b);
  require_ring(radius, n);
  Kahan re;
  Kahan im;
  for (int p = 1; p < n; ++p) {
    const double g = g1_g2(a, b, radius, n, p).second;
    const auto [cm, sm] = unit_root(p, m, n);
    const auto [c1, s1] = unit_root(p, 1, n);
    re.add(g * (cm - c1));
    im.add(g * (sm - s1));
  }
  check_imaginary(re, im, "i2");
  return re.sum;
}

double j_pm(double gamma, double radius, int n, int m, int sign) {
  if (!(gamma > 0.0)) throw DomainError("j_pm: gamma must be positive");
  if (sign != 1 && sign != -1) throw DomainError("j_pm: sign must be +1 or -1");
  require_ring(radius, n);
  Kahan re;
  Kahan im;
  for (int p = 1; p < n; ++p) {
    const double d = chord(radius, p, n);
    const double g = std::pow(1.0 + d * d, -gamma) / n;
    const auto [c, s] = unit_root(p, static_cast<long long>(m) + sign, n);
    re.add(g * (c - 1.0));
    im.add(g * s);
  }
  check_imaginary(re, im, "j_pm");
  return re.sum;
}

ShapeMatrix shape_matrix_at(double a, double b, double radius, int n, int m) {
  return ShapeMatrix{i1(a, b, radius, n, m), i2(a, b, radius, n, m), i1(a, b, radius, n, -m)};
}

ShapeMatrix shape_matrix(double a, double b, int n, int m, double speed) {
  require_power(a, b);
  const auto pot = InteractionPotential::power_law(a, b);
  const double r = speed > 0.0 ? mill_ring(pot, n, speed).radius : flock_ring(pot, n, 0.0).radius;
  return shape_matrix_at(a, b, r, n, m);
}

std::pair<double, double> det_trace(const ShapeMatrix& sm) {
  return {sm.i1_plus * sm.i1_minus - sm.i2 * sm.i2, sm.i1_plus + sm.i1_minus};
}

Matrix4c assemble_flock(const ShapeMatrix& sm, double alpha) {
  Matrix4c l = Matrix4c::Zero();
  l(0, 2) = 1.0;
  l(1, 3) = 1.0;
  l(2, 0) = sm.i1_plus;
  l(2, 1) = sm.i2;
  l(2, 2) = -alpha;
  l(2, 3) = -alpha;
  l(3, 0) = sm.i2;
  l(3, 1) = sm.i1_minus;
  l(3, 2) = -alpha;
  l(3, 3) = -alpha;
  return l;
}

Matrix4c assemble_cs(const ShapeMatrix& sm, double j_plus, double j_minus) {
  Matrix4c l = Matrix4c::Zero();
  l(0, 2) = 1.0;
  l(1, 3) = 1.0;
  l(2, 0) = sm.i1_plus;
  l(2, 1) = sm.i2;
  l(2, 2) = j_plus;
  l(3, 0) = sm.i2;
  l(3, 1) = sm.i1_minus;
  l(3, 3) = j_minus;
  return l;
}

Matrix4c assemble_mill(const ShapeMatrix& sm, double alpha, double omega) {
  const Complex i(0.0, 1.0);
  const double w2 = omega * omega;
  Matrix4c l = Matrix4c::Zero();
  l(0, 2) = 1.0;
  l(1, 3) = 1.0;
  l(2, 0) = -omega * i * alpha + w2 + sm.i1_plus;
  l(2, 1) = -omega * i * alpha + sm.i2;
  l(2, 2) = -alpha - 2.0 * omega * i;
  l(2, 3) = alpha;
  l(3, 0) = omega * i * alpha + sm.i2;
  l(3, 1) = omega * i * alpha + w2 + sm.i1_minus;
  l(3, 2) = alpha;
  l(3, 3) = -alpha + 2.0 * omega * i;
  return l;
}

ModeMatrix flock_mode_matrix(double a, double b, int n, int m, const Propulsion& prop) {
  require_power(a, b);
  if (m < 1) throw DomainError("flock_mode_matrix: m must be >= 1");
  if (!(prop.alpha >= 0.0)) throw DomainError("flock_mode_matrix: alpha must be non-negative");
  const double r = flock_radius(a, b, n);
  ModeMatrix out;
  out.entries = assemble_flock(shape_matrix_at(a, b, r, n, m), prop.alpha);
  out.model = ModelKind::Flock;
  out.params = ModeParams{a, b, n, m, prop.alpha, 0.0, 0.0, r};
  return out;
}

ModeMatrix cs_flock_mode_matrix(double a, double b, int n, int m, double gamma) {
  require_power(a, b);
  if (m < 1) throw DomainError("cs_flock_mode_matrix: m must be >= 1");
  const double r = flock_radius(a, b, n);
  ModeMatrix out;
  out.entries = assemble_cs(shape_matrix_at(a, b, r, n, m), j_pm(gamma, r, n, m, 1),
                            j_pm(gamma, r, n, m, -1));
  out.model = ModelKind::FlockCS;
  out.params = ModeParams{a, b, n, m, 0.0, 0.0, gamma, r};
  return out;
}

ModeMatrix mill_mode_matrix(double a, double b, int n, int m, double alpha, double speed) {
  require_power(a, b);
  if (m < 1) throw DomainError("mill_mode_matrix: m must be >= 1");
  if (!(alpha > 0.0)) throw DomainError("mill_mode_matrix: alpha must be positive");
  if (!(speed >= 0.0)) throw DomainError("mill_mode_matrix: speed must be non-negative");
  const auto pot = InteractionPotential::power_law(a, b);
  const RingSolution ring = speed > 0.0 ? mill_ring(pot, n, speed) : flock_ring(pot, n, 0.0);
  ModeMatrix out;
  out.entries = assemble_mill(shape_matrix_at(a, b, ring.radius, n, m), alpha, ring.omega);
  out.model = ModelKind::Mill;
  out.params = ModeParams{a, b, n, m, alpha, ring.omega, 0.0, ring.radius};
  return out;
}

int forced_zero_count(ModelKind model, int m) {
  if (m != 1) return 0;
  switch (model) {
    case ModelKind::Flock: return 1;
    case ModelKind::FlockCS: return 2;
    case ModelKind::Mill: return 0;
  }
  return 0;
}

double default_tolerance(const Matrix4c& mat) { return 1e-8 * std::max(1.0, max_norm(mat)); }

Classification classify(const std::array<Complex, 4>& eigenvalues, ModelKind model, int m,
                        double tol) {
  double max_real = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues) max_real = std::max(max_real, z.real());
  if (max_real > tol) return Classification::Unstable;
  if (max_real < -tol) return Classification::Stable;
  const int forced = forced_zero_count(model, m);
  if (forced == 0) return Classification::Marginal;
  int near_zero = 0;
  bool rest_decay = true;
  for (const auto& z : eigenvalues) {
    if (std::abs(z) <= tol) {
      ++near_zero;
    } else if (!(z.real() < -tol)) {
      rest_decay = false;
    }
  }
  return near_zero == forced && rest_decay ? Classification::Stable : Classification::Marginal;
}

namespace {

SpectralReport report_for(const Matrix4c& mat, ModelKind model, int m) {
  SpectralReport rep;
  rep.m = m;
  rep.eigenvalues = eig4(mat);
  rep.max_real = rep.eigenvalues[0].real();
  for (const auto& z : rep.eigenvalues) rep.max_real = std::max(rep.max_real, z.real());
  rep.tolerance = default_tolerance(mat);
  rep.classification = classify(rep.eigenvalues, model, m, rep.tolerance);
  return rep;
}

}  // namespace

SpectralReport analyze(const ModeMatrix& mat) {
  return report_for(mat.entries, mat.model, mat.params.m);
}

Envelope mode_envelope_at(const ModelSpec& spec, double radius, int m_max, bool keep_table) {
  require_power(spec.a, spec.b);
  require_ring(radius, spec.n);
  if (m_max <= 0) m_max = spec.n / 2;
  if (m_max < 2) throw DomainError("mode_envelope: m_max must be at least 2");

  const ShapeMoments shape(spec.a, spec.b, radius, spec.n);
  std::optional<KernelMoments> kernel;
  if (spec.kind == ModelKind::FlockCS) kernel.emplace(spec.gamma, radius, spec.n);
  const double omega = spec.kind == ModelKind::Mill ? spec.speed / radius : 0.0;

  Envelope env;
  env.radius = radius;
  bool all_stable = true;
  bool any_unstable = false;
  bool first = true;
  if (keep_table) env.modes.reserve(static_cast<size_t>(m_max - 1));
  for (int m = 2; m <= m_max; ++m) {
    const ShapeMatrix sm{shape.i1(m), shape.i2(m), shape.i1(-m)};
    Matrix4c mat;
    switch (spec.kind) {
      case ModelKind::Flock: mat = assemble_flock(sm, spec.alpha); break;
      case ModelKind::FlockCS: mat = assemble_cs(sm, kernel->j(m, 1), kernel->j(m, -1)); break;
      case ModelKind::Mill: mat = assemble_mill(sm, spec.alpha, omega); break;
    }
    SpectralReport rep = report_for(mat, spec.kind, m);
    if (rep.classification != Classification::Stable) all_stable = false;
    if (rep.classification == Classification::Unstable) any_unstable = true;
    if (first || rep.max_real > env.worst.max_real) {
      env.worst = rep;
      env.critical_mode = m;
      first = false;
    }
    if (keep_table) env.modes.push_back(rep);
  }
  env.classification = all_stable     ? Classification::Stable
                       : any_unstable ? Classification::Unstable
                                      : Classification::Marginal;
  return env;
}

Envelope mode_envelope(const ModelSpec& spec, int m_max, bool keep_table) {
  require_power(spec.a, spec.b);
  const auto pot = InteractionPotential::power_law(spec.a, spec.b);
  double radius;
  if (spec.kind == ModelKind::Mill) {
    if (!(spec.speed >= 0.0)) throw DomainError("mode_envelope: speed must be non-negative");
    if (!(spec.alpha > 0.0)) throw DomainError("mode_envelope: alpha must be positive");
    radius = spec.speed > 0.0 ? mill_ring(pot, spec.n, spec.speed).radius
                              : flock_ring(pot, spec.n, 0.0).radius;
  } else {
    radius = flock_ring(pot, spec.n, 0.0).radius;
  }
  return mode_envelope_at(spec, radius, m_max, keep_table);
}

DetAsymptotics det_asymptotics(double a, double b, int n, const std::vector<int>& m_values) {
  require_power(a, b);
  if (m_values.size() < 2) throw DomainError("det_asymptotics: need at least two modes");
  const double r = flock_radius(a, b, n);
  const ShapeMoments shape(a, b, r, n);
  DetAsymptotics out;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (int m : m_values) {
    if (m < 2) throw DomainError("det_asymptotics: modes must be >= 2");
    const ShapeMatrix sm{shape.i1(m), shape.i2(m), shape.i1(-m)};
    const double d = det_trace(sm).first;
    out.table.emplace_back(m, d);
    if (d == 0.0) continue;
    const double x = std::log(static_cast<double>(m));
    const double y = std::log(std::abs(d));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) throw NumericalError("det_asymptotics: fewer than two non-zero determinants");
  out.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return out;
}

}  // namespace swarmlab
