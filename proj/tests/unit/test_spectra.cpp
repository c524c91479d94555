#include "swarmlab/errors.hpp"
#include "swarmlab/mode_sums.hpp"
#include "swarmlab/rings.hpp"
#include "swarmlab/spectra.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace swarmlab;

namespace {
const double kR = 1.0 / std::sqrt(3.0);

double min_abs(const std::array<Complex, 4>& ev) {
  double m = std::abs(ev[0]);
  for (auto z : ev) m = std::min(m, std::abs(z));
  return m;
}
}  // namespace

TEST_CASE("g1 g2 hand values") {
  auto [g1, g2] = g1_g2(4, 2, kR, 4, 2);
  CHECK(g1 == doctest::Approx(-5.0 / 12).epsilon(1e-14));
  CHECK(g2 == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  std::tie(g1, g2) = g1_g2(4, 2, kR, 4, 1);
  CHECK(g1 == doctest::Approx(-1.0 / 12).epsilon(1e-14));
  CHECK(g2 == doctest::Approx(-1.0 / 6).epsilon(1e-14));
  CHECK_THROWS_AS(g1_g2(2, 2, kR, 4, 1), DomainError);
  CHECK_THROWS_AS(g1_g2(4, 2, kR, 4, 0), DomainError);
}

TEST_CASE("I1 I2 hand values and identities") {
  CHECK(i1(4, 2, kR, 4, 2) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(i2(4, 2, kR, 4, 2) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  CHECK(i1(4, 2, kR, 4, -2) == doctest::Approx(-1.0).epsilon(1e-14));
  for (int n : {7, 50, 301}) {
    const double r = flock_ring(InteractionPotential::power_law(3.5, 1.2), n, 0).radius;
    CHECK(i2(3.5, 1.2, r, n, 1) == 0.0);
    CHECK(std::abs(i1(3.5, 1.2, r, n, -1)) < 1e-15);
    for (int m = 2; m < 9; ++m) CHECK(i2(3.5, 1.2, r, n, m) == doctest::Approx(i2(3.5, 1.2, r, n, -m)).epsilon(1e-12));
  }
}

TEST_CASE("J hand value and sign") {
  // (1/4) sum_p (1+d_p^2)^-1 (cos(pi p (m+1)/2) - 1) evaluated at 30 digits.
  CHECK(j_pm(1.0, kR, 4, 2, 1) == doctest::Approx(-18.0 / 35).epsilon(1e-14));
  CHECK(j_pm(1.0, kR, 4, 2, -1) == doctest::Approx(-18.0 / 35).epsilon(1e-14));
  CHECK(j_pm(0.7, 0.8, 30, 1, -1) == 0.0);
  for (int m = 1; m < 20; ++m) {
    CHECK(j_pm(0.5, 0.6, 40, m, 1) <= 0.0);
    CHECK(j_pm(2.0, 0.6, 40, m, -1) <= 0.0);
  }
}

TEST_CASE("FFT moments match direct sums") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(1.5, 7.0), frac(0.1, 0.9);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = ua(rng);
    const double b = a * frac(rng);
    const int n = 3 + static_cast<int>(rng() % 400);
    const double r = flock_ring(InteractionPotential::power_law(a, b), n, 0).radius;
    const ShapeMoments sm(a, b, r, n);
    const KernelMoments km(1.3, r, n);
    for (int m : {-3, -1, 1, 2, 3, n / 2, n - 1, n + 2}) {
      const double scale = 1e-12 * (1.0 + std::abs(i1(a, b, r, n, m)));
      CHECK(std::abs(sm.i1(m) - i1(a, b, r, n, m)) < scale);
      CHECK(std::abs(sm.i2(m) - i2(a, b, r, n, m)) < 1e-12 * (1.0 + std::abs(i2(a, b, r, n, m))));
      CHECK(std::abs(km.j(m, 1) - j_pm(1.3, r, n, m, 1)) < 1e-13);
      CHECK(std::abs(km.j(m, -1) - j_pm(1.3, r, n, m, -1)) < 1e-13);
    }
  }
}

TEST_CASE("cosine transform and index folding") {
  const std::vector<double> g{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto c = cosine_transform(g);
  REQUIRE(c.size() == 3);
  for (int k = 0; k < 3; ++k) {
    double s = 0.0;
    for (int p = 0; p < 5; ++p) s += g[p] * std::cos(2 * M_PI * p * k / 5);
    CHECK(c[k] == doctest::Approx(s).epsilon(1e-13));
  }
  CHECK(fold_index(7, 5) == 2);
  CHECK(fold_index(-3, 5) == 2);
  CHECK(fold_index(4, 8) == 4);
  CHECK(fold_index(6, 8) == 2);
}

TEST_CASE("shape matrix and det/trace") {
  const auto sm = shape_matrix(4, 2, 4, 2, 0.0);
  CHECK(sm.i1_plus == doctest::Approx(-1.0));
  CHECK(sm.i2 == doctest::Approx(-1.0 / 3));
  CHECK(sm.i1_minus == doctest::Approx(-1.0));
  const auto [d, t] = det_trace(sm);
  CHECK(d == doctest::Approx(8.0 / 9));
  CHECK(t == doctest::Approx(-2.0));
  const auto one = det_trace(ShapeMatrix{1.0, 0.0, 1.0});
  CHECK(one.first == 1.0);
  CHECK(one.second == 2.0);
  CHECK(std::abs(det_trace(shape_matrix(5, 1.5, 200, 1, 0.0)).first) < 1e-10);
  bool violated = false;
  for (int m = 2; m <= 500 && !violated; ++m) {
    const auto [dd, tt] = det_trace(shape_matrix(5, 0.5, 1000, m, 0.0));
    violated = !(dd > 0 && tt < 0);
  }
  CHECK(violated);
}

TEST_CASE("mode matrix layouts") {
  const auto f = flock_mode_matrix(4, 2, 4, 2, Propulsion{1.5, 1.0});
  CHECK(f.entries(0, 2) == Complex(1.0));
  CHECK(f.entries(1, 3) == Complex(1.0));
  CHECK(f.entries(2, 2) == Complex(-1.5));
  CHECK(f.entries(3, 2) == Complex(-1.5));
  CHECK(f.entries(2, 0).real() == doctest::Approx(-1.0));
  const auto c = cs_flock_mode_matrix(4, 2, 4, 2, 1.0);
  CHECK(c.entries(2, 3) == Complex(0.0));
  CHECK(c.entries(3, 2) == Complex(0.0));
  CHECK(c.entries(2, 2).real() == doctest::Approx(-18.0 / 35));
  const auto m0 = mill_mode_matrix(4, 2, 50, 3, 1.0, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(m0.entries(i, j).imag() == 0.0);
  CHECK(m0.entries(2, 2).real() == -1.0);
  CHECK(m0.entries(2, 3).real() == 1.0);
  const auto m1 = mill_mode_matrix(4, 2, 50, 3, 1.0, 1.0);
  CHECK(m1.params.omega == doctest::Approx(1.0 / m1.params.radius));
  CHECK(m1.entries(2, 3) == Complex(1.0));
  CHECK(m1.entries(2, 2) == Complex(-1.0, -2.0 * m1.params.omega));
}

TEST_CASE("flock velocity block spectrum") {
  Matrix4c v = Matrix4c::Zero();
  v(2, 2) = v(2, 3) = v(3, 2) = v(3, 3) = -0.7;
  const auto sm = ShapeMatrix{0.0, 0.0, 0.0};
  const auto mat = assemble_flock(sm, 0.7);
  const auto ev = eig4(mat);
  CHECK(std::abs(ev.back() - Complex(-1.4)) < 1e-14);
}

TEST_CASE("alpha zero flock matrix gives square roots of M") {
  const ShapeMatrix sm{-1.0, -1.0 / 3, -1.0};
  const auto ev = eig4(assemble_flock(sm, 0.0));
  // M has eigenvalues -2/3 and -4/3.
  for (auto z : ev) {
    const double mu = (z * z).real();
    CHECK((std::abs(mu + 2.0 / 3) < 1e-12 || std::abs(mu + 4.0 / 3) < 1e-12));
  }
}

TEST_CASE("m = 1 zero modes for flock and CS") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(1.5, 7.0), frac(0.1, 0.9), ual(0.2, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double a = ua(rng), b = a * frac(rng);
    const int n = 10 + static_cast<int>(rng() % 500);
    CHECK(min_abs(analyze(flock_mode_matrix(a, b, n, 1, Propulsion{ual(rng), 1.0})).eigenvalues) < 1e-8);
    const auto cs = analyze(cs_flock_mode_matrix(a, b, n, 1, ual(rng)));
    int zeros = 0;
    for (auto z : cs.eigenvalues) zeros += std::abs(z) < 1e-8;
    CHECK(zeros >= 1);
  }
}

TEST_CASE("mill at m = 1 carries the rotating-frame translation eigenvalue") {
  const auto mat = mill_mode_matrix(4, 2, 100, 1, 1.0, 0.5);
  const auto rep = analyze(mat);
  double best = 1e300;
  for (auto z : rep.eigenvalues) best = std::min(best, std::abs(z - Complex(0, mat.params.omega)));
  CHECK(best < 1e-9);
}

TEST_CASE("classification rule") {
  using C = Complex;
  CHECK(classify({C(-1), C(-2), C(-0.5, 1), C(-0.5, -1)}, ModelKind::Flock, 2, 1e-8) == Classification::Stable);
  CHECK(classify({C(1e-3), C(-2), C(-1), C(-1)}, ModelKind::Flock, 2, 1e-8) == Classification::Unstable);
  CHECK(classify({C(0), C(-2), C(-1), C(-1)}, ModelKind::Flock, 2, 1e-8) == Classification::Marginal);
  CHECK(classify({C(0), C(-2), C(-1), C(-1)}, ModelKind::Flock, 1, 1e-8) == Classification::Stable);
  CHECK(classify({C(0), C(0), C(-1), C(-1)}, ModelKind::Flock, 1, 1e-8) == Classification::Marginal);
  CHECK(classify({C(0), C(0), C(-1), C(-1)}, ModelKind::FlockCS, 1, 1e-8) == Classification::Stable);
  CHECK(classify({C(0), C(-2), C(-1), C(-1)}, ModelKind::Mill, 1, 1e-8) == Classification::Marginal);
  CHECK(classify({C(1e-9, 3), C(-2), C(-1), C(-1)}, ModelKind::Mill, 2, 1e-8) == Classification::Marginal);
  CHECK(forced_zero_count(ModelKind::Flock, 1) == 1);
  CHECK(forced_zero_count(ModelKind::FlockCS, 1) == 2);
  CHECK(forced_zero_count(ModelKind::Mill, 1) == 0);
  CHECK(forced_zero_count(ModelKind::Flock, 2) == 0);
}

TEST_CASE("stable sample and reduced criterion") {
  // I1(m) = I1(-m) here, so the rank-one damping misses (1,-1): an undamped pair +-i sqrt(2/3).
  const auto rep = analyze(flock_mode_matrix(4, 2, 4, 2, Propulsion{1.0, 1.0}));
  CHECK(rep.classification == Classification::Marginal);
  CHECK(std::abs(rep.eigenvalues[0] - Complex(0.0, std::sqrt(2.0 / 3))) < 1e-12);
  CHECK(analyze(flock_mode_matrix(3, 2, 1000, 2, Propulsion{1.0, 1.0})).classification == Classification::Stable);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(1.5, 8.0), frac(0.05, 0.95), ual(0.1, 4.0);
  int checked = 0;
  for (int k = 0; k < 150; ++k) {
    const double a = ua(rng), b = a * frac(rng);
    const int n = 4 + static_cast<int>(rng() % 1997);
    const int m = 2 + static_cast<int>(rng() % (n / 2 - 1));
    const auto mat = flock_mode_matrix(a, b, n, m, Propulsion{ual(rng), ual(rng)});
    const auto r = analyze(mat);
    const ShapeMatrix sm{mat.entries(2, 0).real(), mat.entries(2, 1).real(), mat.entries(3, 1).real()};
    const auto [d, t] = det_trace(sm);
    const double band = r.tolerance;
    if (std::abs(r.max_real) <= band || std::abs(d) <= band * band || std::abs(t) <= band) continue;
    ++checked;
    CHECK((r.max_real > 0) == !(d > 0 && t < 0));
  }
  CHECK(checked > 100);
}

TEST_CASE("mill rotation sense does not change real parts") {
  const auto pos = mill_mode_matrix(5, 1.25, 200, 3, 1.0, 0.5);
  Matrix4c neg = pos.entries.conjugate();
  const auto ep = eig4(pos.entries);
  const auto en = eig4(neg);
  for (int k = 0; k < 4; ++k) CHECK(ep[k].real() == doctest::Approx(en[k].real()).epsilon(1e-12));
}

TEST_CASE("envelope bookkeeping") {
  ModelSpec spec{ModelKind::Flock, 3.0, 2.5, 200};
  const auto env = mode_envelope(spec, 0, true);
  CHECK(env.modes.size() == 99);
  double worst = -1e300;
  for (const auto& r : env.modes) worst = std::max(worst, r.max_real);
  CHECK(env.worst.max_real == worst);
  CHECK(env.modes[env.critical_mode - 2].max_real == worst);
  CHECK(env.classification == Classification::Unstable);
  // nesting: a larger mode range can only remove stability
  ModelSpec s2{ModelKind::Flock, 5.0, 1.6, 400};
  bool prev_stable = true;
  for (int mm : {2, 10, 50, 200}) {
    const bool stable = mode_envelope(s2, mm).classification != Classification::Unstable;
    if (!prev_stable) CHECK_FALSE(stable);
    prev_stable = stable;
  }
  CHECK_THROWS_AS(mode_envelope(spec, 1), DomainError);
  CHECK(mode_envelope(spec, 5, false).modes.empty());
}

TEST_CASE("envelope single modes match direct assembly") {
  ModelSpec spec{ModelKind::Mill, 5.0, 1.25, 300, 1.0, 0.5};
  const auto env = mode_envelope(spec, 20, true);
  for (int m : {2, 7, 20}) {
    const auto direct = analyze(mill_mode_matrix(5.0, 1.25, 300, m, 1.0, 0.5));
    CHECK(env.modes[m - 2].max_real == doctest::Approx(direct.max_real).epsilon(1e-9));
    CHECK(env.modes[m - 2].classification == direct.classification);
  }
}

TEST_CASE("det asymptotics") {
  std::vector<int> ms;
  for (int m = 64; m <= 4096; m *= 2) ms.push_back(m);
  const auto da = det_asymptotics(5, 1.5, 100000, ms);
  CHECK(da.slope == doctest::Approx(-0.5).epsilon(0.2));
  // b below the separatrix: det changes sign for large m
  const auto lo = det_asymptotics(5, 1.2, 100000, ms);
  bool pos = false, neg = false;
  for (auto [m, d] : lo.table) (d > 0 ? pos : neg) = true;
  CHECK((pos && neg));
  CHECK_THROWS_AS(det_asymptotics(5, 1.5, 100, {64}), DomainError);
}

TEST_CASE("model names") {
  CHECK(parse_model("flock") == ModelKind::Flock);
  CHECK(parse_model("flock-cs") == ModelKind::FlockCS);
  CHECK(parse_model("mill") == ModelKind::Mill);
  CHECK(to_string(ModelKind::FlockCS) == "flock-cs");
  CHECK_THROWS_AS(parse_model("swarm"), DomainError);
}
