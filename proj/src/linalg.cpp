#include "swarmlab/linalg.hpp"

#include "swarmlab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace swarmlab {

namespace {

using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Householder reduction to upper Hessenberg form.
void hessenberg(MatrixXc& h) {
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    Eigen::Matrix<Complex, Eigen::Dynamic, 1> x = h.block(k + 1, k, n - k - 1, 1);
    const double xnorm = x.norm();
    if (xnorm == 0.0) continue;
    const Complex x0 = x(0);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0) : x0 / std::abs(x0);
    x(0) += phase * xnorm;
    const double vnorm = x.norm();
    if (vnorm == 0.0) continue;
    x /= vnorm;
    // H <- (I - 2vv*) H (I - 2vv*)
    auto rows = h.block(k + 1, 0, n - k - 1, n);
    rows -= 2.0 * x * (x.adjoint() * rows);
    auto cols = h.block(0, k + 1, n, n - k - 1);
    cols -= 2.0 * (cols * x) * x.adjoint();
    for (Eigen::Index i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d) {
  // Eigenvalue of [[a,b],[c,d]] closer to d.
  const Complex tr = 0.5 * (a + d);
  const Complex det = a * d - b * c;
  const Complex disc = std::sqrt(tr * tr - det);
  const Complex l1 = tr + disc;
  const Complex l2 = tr - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

void givens(Complex f, Complex g, double& c, Complex& s) {
  const double fa = std::abs(f);
  const double ga = std::abs(g);
  if (ga == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (fa == 0.0) {
    c = 0.0;
    s = std::conj(g) / ga;
    return;
  }
  const double r = std::hypot(fa, ga);
  c = fa / r;
  s = (f / fa) * std::conj(g) / r;
}

// Single-shift QR on an upper Hessenberg matrix; appends eigenvalues to out.
void hessenberg_qr(MatrixXc h, std::vector<Complex>& out) {
  Eigen::Index hi = h.rows() - 1;
  int iter = 0;
  int total = 0;
  const int max_total = 60 * static_cast<int>(h.rows());
  while (hi >= 0) {
    if (hi == 0) {
      out.push_back(h(0, 0));
      break;
    }
    Eigen::Index lo = hi;
    while (lo > 0) {
      const double scale = abs1(h(lo, lo)) + abs1(h(lo - 1, lo - 1));
      if (abs1(h(lo, lo - 1)) <= kEps * scale || abs1(h(lo, lo - 1)) < std::numeric_limits<double>::min()) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      out.push_back(h(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (++total > max_total) {
      std::ostringstream os;
      os << "eig4: QR iteration did not converge after " << total << " sweeps (active block "
         << lo << ".." << hi << ")";
      throw NumericalError(os.str());
    }
    ++iter;
    Complex shift;
    if (iter % 10 == 0) {
      shift = h(hi, hi) + Complex(std::abs(h(hi, hi - 1).real()), std::abs(h(hi, hi - 1).imag())) * 1.5;
    } else {
      shift = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }
    const Eigen::Index n = h.rows();
    std::vector<double> cs(static_cast<size_t>(hi - lo));
    std::vector<Complex> ss(static_cast<size_t>(hi - lo));
    for (Eigen::Index k = lo; k <= hi; ++k) h(k, k) -= shift;
    for (Eigen::Index k = lo; k < hi; ++k) {
      double c;
      Complex s;
      givens(h(k, k), h(k + 1, k), c, s);
      cs[k - lo] = c;
      ss[k - lo] = s;
      for (Eigen::Index j = k; j < n; ++j) {
        const Complex t1 = h(k, j);
        const Complex t2 = h(k + 1, j);
        h(k, j) = c * t1 + s * t2;
        h(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
    }
    for (Eigen::Index k = lo; k < hi; ++k) {
      const double c = cs[k - lo];
      const Complex s = ss[k - lo];
      for (Eigen::Index i = 0; i <= std::min(k + 2, hi); ++i) {
        const Complex t1 = h(i, k);
        const Complex t2 = h(i, k + 1);
        h(i, k) = c * t1 + std::conj(s) * t2;
        h(i, k + 1) = -s * t1 + c * t2;
      }
    }
    for (Eigen::Index k = lo; k <= hi; ++k) h(k, k) += shift;
  }
}

}  // namespace

std::array<Complex, 4> eig4(const Matrix4c& mat) {
  if (!mat.allFinite()) throw NumericalError("eig4: non-finite matrix entry");
  std::vector<int> active{0, 1, 2, 3};
  std::vector<Complex> vals;
  bool changed = true;
  while (changed && !active.empty()) {
    changed = false;
    for (size_t idx = 0; idx < active.size(); ++idx) {
      const int i = active[idx];
      bool row_zero = true;
      bool col_zero = true;
      for (int j : active) {
        if (j == i) continue;
        if (mat(i, j) != 0.0) row_zero = false;
        if (mat(j, i) != 0.0) col_zero = false;
      }
      if (row_zero || col_zero) {
        vals.push_back(mat(i, i));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
        changed = true;
        break;
      }
    }
  }
  if (!active.empty()) {
    const auto k = static_cast<Eigen::Index>(active.size());
    MatrixXc sub(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = mat(active[r], active[c]);
    hessenberg(sub);
    hessenberg_qr(sub, vals);
  }
  std::array<Complex, 4> out;
  std::copy(vals.begin(), vals.end(), out.begin());
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

double max_norm(const Matrix4c& mat) { return mat.cwiseAbs().maxCoeff(); }

double max_norm(const Eigen::MatrixXd& mat) {
  return mat.size() == 0 ? 0.0 : mat.cwiseAbs().maxCoeff();
}

double min_singular_value_shifted(const Matrix4c& mat, Complex lambda) {
  const Matrix4c shifted = mat - lambda * Matrix4c::Identity();
  Eigen::JacobiSVD<Matrix4c> svd(shifted);
  return svd.singularValues()(3);
}

std::vector<Complex> dense_eigvals(const Eigen::MatrixXd& mat) {
  if (mat.rows() != mat.cols()) throw DomainError("dense_eigvals: matrix must be square");
  if (!mat.allFinite()) throw NumericalError("dense_eigvals: non-finite matrix entry");
  Eigen::EigenSolver<Eigen::MatrixXd> es(mat, false);
  if (es.info() != Eigen::Success) throw NumericalError("dense_eigvals: eigen solver failed");
  const auto& ev = es.eigenvalues();
  std::vector<Complex> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

std::vector<double> dense_eigvals_symmetric(const Eigen::MatrixXd& mat) {
  if (mat.rows() != mat.cols()) throw DomainError("dense_eigvals_symmetric: matrix must be square");
  if (!mat.allFinite()) throw NumericalError("dense_eigvals_symmetric: non-finite matrix entry");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("dense_eigvals_symmetric: solver failed");
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + mat.rows());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace swarmlab
