#include "swarmlab/errors.hpp"
#include "swarmlab/linalg.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace swarmlab;

namespace {

// Characteristic polynomial coefficients c0..c4 (monic) via Faddeev-LeVerrier.
std::array<Complex, 5> char_poly(const Matrix4c& a) {
  std::array<Complex, 5> c{};
  c[4] = 1.0;
  Matrix4c m = Matrix4c::Zero();
  for (int k = 1; k <= 4; ++k) {
    m = a * m + c[5 - k] * Matrix4c::Identity();
    c[4 - k] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

// Aberth-Ehrlich simultaneous root iteration, used only as an oracle.
std::array<Complex, 4> aberth_roots(const std::array<Complex, 5>& c) {
  auto p = [&](Complex z) { return (((c[4] * z + c[3]) * z + c[2]) * z + c[1]) * z + c[0]; };
  auto dp = [&](Complex z) { return ((4.0 * c[4] * z + 3.0 * c[3]) * z + 2.0 * c[2]) * z + c[1]; };
  double bound = 0.0;
  for (int k = 0; k < 4; ++k) bound = std::max(bound, std::abs(c[k]));
  bound += 1.0;
  std::array<Complex, 4> z;
  for (int k = 0; k < 4; ++k) z[k] = std::polar(0.5 * bound, 2.0 * M_PI * k / 4 + 0.4);
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (int k = 0; k < 4; ++k) {
      const Complex ratio = p(z[k]) / dp(z[k]);
      Complex s = 0.0;
      for (int j = 0; j < 4; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const Complex w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      moved = std::max(moved, std::abs(w));
    }
    if (moved < 1e-15 * bound) break;
  }
  return z;
}

bool matches(std::array<Complex, 4> got, std::array<Complex, 4> want, double tol) {
  std::vector<bool> used(4, false);
  for (auto z : got) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k)
      if (!used[k] && std::abs(z - want[k]) < dist) {
        dist = std::abs(z - want[k]);
        best = k;
      }
    if (dist > tol) return false;
    used[best] = true;
  }
  return true;
}

void check_contract(const Matrix4c& m) {
  const auto ev = eig4(m);
  const double nrm = std::max(1.0, max_norm(m));
  Complex tr = 0.0, det = 1.0;
  for (auto z : ev) {
    CHECK(min_singular_value_shifted(m, z) < 1e-9 * nrm);
    tr += z;
    det *= z;
  }
  CHECK(std::abs(tr - m.trace()) <= 1e-9 * std::max(1.0, std::abs(m.trace())));
  const Complex d = m.determinant();
  CHECK(std::abs(det - d) <= 1e-9 * std::max(1.0, std::abs(d)));
  for (int k = 0; k + 1 < 4; ++k) {
    CHECK((ev[k].real() > ev[k + 1].real() ||
           (ev[k].real() == ev[k + 1].real() && ev[k].imag() >= ev[k + 1].imag())));
  }
}

}  // namespace

TEST_CASE("eig4 identity and diagonal") {
  auto ev = eig4(Matrix4c::Identity());
  for (auto z : ev) CHECK(z == Complex(1.0, 0.0));
  Matrix4c d = Matrix4c::Zero();
  d.diagonal() << 1.0, -2.0, Complex(0, 3), Complex(0, -3);
  ev = eig4(d);
  CHECK(ev[0] == Complex(1.0, 0.0));
  CHECK(ev[1] == Complex(0.0, 3.0));
  CHECK(ev[2] == Complex(0.0, -3.0));
  CHECK(ev[3] == Complex(-2.0, 0.0));
}

TEST_CASE("eig4 companion block") {
  Matrix4c m = Matrix4c::Zero();
  m(0, 2) = m(1, 3) = 1.0;
  m(2, 0) = 4.0;
  m(3, 1) = -9.0;
  const auto ev = eig4(m);
  CHECK(matches(ev, {Complex(2, 0), Complex(-2, 0), Complex(0, 3), Complex(0, -3)}, 1e-12));
  check_contract(m);
}

TEST_CASE("eig4 structural zeros are exact") {
  Matrix4c m = Matrix4c::Zero();
  m(0, 2) = m(1, 3) = 1.0;
  m(2, 0) = -1.0;
  m(2, 2) = m(2, 3) = m(3, 2) = m(3, 3) = -1.0;
  const auto ev = eig4(m);
  double mn = 1.0;
  for (auto z : ev) mn = std::min(mn, std::abs(z));
  CHECK(mn == 0.0);
  check_contract(m);
}

TEST_CASE("eig4 defective and repeated spectra") {
  Matrix4c jordan = Matrix4c::Zero();
  jordan.diagonal().setConstant(2.0);
  jordan(0, 1) = jordan(1, 2) = jordan(2, 3) = 1.0;
  check_contract(jordan);
  Matrix4c nil = Matrix4c::Zero();
  nil(0, 1) = nil(1, 2) = nil(2, 3) = 1.0;
  check_contract(nil);
  check_contract(Matrix4c::Zero());
}

TEST_CASE("eig4 random matrices: contract, Eigen and Aberth agree") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 300; ++k) {
    Matrix4c m;
    const double scale = std::pow(10.0, (k % 7) - 3);
    for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = scale * Complex(nd(rng), k % 3 == 0 ? 0.0 : nd(rng));
    check_contract(m);
    const auto ev = eig4(m);
    Eigen::ComplexEigenSolver<Matrix4c> ces(m, false);
    std::array<Complex, 4> ref;
    for (int i = 0; i < 4; ++i) ref[i] = ces.eigenvalues()[i];
    CHECK(matches(ev, ref, 1e-8 * std::max(1.0, max_norm(m))));
    CHECK(matches(ev, aberth_roots(char_poly(m)), 1e-6 * std::max(1.0, max_norm(m))));
  }
}

TEST_CASE("eig4 rejects non-finite input") {
  Matrix4c m = Matrix4c::Identity();
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eig4(m), NumericalError);
}

TEST_CASE("dense eigensolvers") {
  Eigen::MatrixXd s(3, 3);
  s << 2, 1, 0, 1, 2, 0, 0, 0, -1;
  const auto sym = dense_eigvals_symmetric(s);
  REQUIRE(sym.size() == 3);
  CHECK(sym[0] == doctest::Approx(3.0));
  CHECK(sym[1] == doctest::Approx(1.0));
  CHECK(sym[2] == doctest::Approx(-1.0));
  Eigen::MatrixXd r(2, 2);
  r << 0, 1, -1, 0;
  const auto ev = dense_eigvals(r);
  REQUIRE(ev.size() == 2);
  CHECK(std::abs(ev[0].real()) < 1e-14);
  CHECK(std::abs(std::abs(ev[0].imag()) - 1.0) < 1e-14);
  Eigen::MatrixXd e(2, 3);
  e << 1, -7, 3, 0, 2, 0;
  CHECK(max_norm(e) == 7.0);
}
