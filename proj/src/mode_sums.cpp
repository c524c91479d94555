#include "swarmlab/mode_sums.hpp"

#include "swarmlab/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace swarmlab {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double chord(double radius, int p, int n) {
  const int q = p <= n - p ? p : n - p;
  return 2.0 * radius * std::sin(std::numbers::pi * q / n);
}

}  // namespace

long long fold_index(long long k, int n) {
  long long r = (k < 0 ? -k : k) % n;
  return r <= n - r ? r : n - r;
}

std::vector<double> cosine_transform(const std::vector<double>& g) {
  const int n = static_cast<int>(g.size());
  if (n < 1) throw DomainError("cosine_transform: empty input");
  double* in = fftw_alloc_real(static_cast<size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
  if (in == nullptr || out == nullptr) {
    fftw_free(in);
    fftw_free(out);
    throw NumericalError("cosine_transform: allocation failed");
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  for (int i = 0; i < n; ++i) in[i] = g[static_cast<size_t>(i)];
  fftw_execute(plan);
  std::vector<double> c(static_cast<size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) c[static_cast<size_t>(k)] = out[k][0];
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return c;
}

ShapeMoments::ShapeMoments(double a, double b, double radius, int n) : n_(n) {
  if (n < 3) throw DomainError("ShapeMoments: n must be at least 3");
  if (!(b > 0.0) || !(a > b)) throw DomainError("ShapeMoments: requires a > b > 0");
  if (!(radius > 0.0)) throw DomainError("ShapeMoments: radius must be positive");
  std::vector<double> g1(static_cast<size_t>(n), 0.0);
  std::vector<double> g2(static_cast<size_t>(n), 0.0);
  const double scale = 1.0 / (2.0 * n);
  for (int p = 1; p < n; ++p) {
    const double d = chord(radius, p, n);
    const double da = std::pow(d, a - 2.0);
    const double db = std::pow(d, b - 2.0);
    g1[static_cast<size_t>(p)] = scale * (-a * da + b * db);
    g2[static_cast<size_t>(p)] = scale * (-(a - 2.0) * da + (b - 2.0) * db);
  }
  c1_ = cosine_transform(g1);
  c2_ = cosine_transform(g2);
}

double ShapeMoments::c1(long long k) const { return c1_[static_cast<size_t>(fold_index(k, n_))]; }
double ShapeMoments::c2(long long k) const { return c2_[static_cast<size_t>(fold_index(k, n_))]; }

double ShapeMoments::i1(int m) const {
  return c1(0) - c1(static_cast<long long>(m) + 1);
}

double ShapeMoments::i2(int m) const { return c2(m) - c2(1); }

KernelMoments::KernelMoments(double gamma, double radius, int n) : n_(n) {
  if (n < 3) throw DomainError("KernelMoments: n must be at least 3");
  if (!(gamma > 0.0)) throw DomainError("KernelMoments: gamma must be positive");
  if (!(radius > 0.0)) throw DomainError("KernelMoments: radius must be positive");
  std::vector<double> g(static_cast<size_t>(n), 0.0);
  for (int p = 1; p < n; ++p) {
    const double d = chord(radius, p, n);
    g[static_cast<size_t>(p)] = std::pow(1.0 + d * d, -gamma) / n;
  }
  k_ = cosine_transform(g);
}

double KernelMoments::k(long long idx) const { return k_[static_cast<size_t>(fold_index(idx, n_))]; }

double KernelMoments::j(int m, int sign) const {
  if (sign != 1 && sign != -1) throw DomainError("KernelMoments::j: sign must be +1 or -1");
  return k(static_cast<long long>(m) + sign) - k(0);
}

}  // namespace swarmlab
