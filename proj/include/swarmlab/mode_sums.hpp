#pragma once

// Cosine transforms of the ring sums. One real FFT of length N gives
// C(k) = sum_p g_p cos(2 pi p k / N) for every k at once, from which the
// per-mode quantities I1, I2 and J+/- are differences of two entries.

#include <vector>

namespace swarmlab {

/// C(k) for k = 0..N/2 of the sequence g_0..g_{N-1} (g_0 included as given).
std::vector<double> cosine_transform(const std::vector<double>& g);

class ShapeMoments {
 public:
  /// Power law (a, b) on the ring of radius R with n particles.
  ShapeMoments(double a, double b, double radius, int n);

  int n() const { return n_; }
  double i1(int m) const;
  double i2(int m) const;

 private:
  double c1(long long k) const;
  double c2(long long k) const;

  int n_;
  std::vector<double> c1_;
  std::vector<double> c2_;
};

class KernelMoments {
 public:
  /// Alignment kernel g(r) = (1+r^2)^-gamma on the ring.
  KernelMoments(double gamma, double radius, int n);

  /// sign = +1 for J+(m), -1 for J-(m).
  double j(int m, int sign) const;

 private:
  double k(long long idx) const;

  int n_;
  std::vector<double> k_;
};

/// Reduced frequency index: |k| mod n folded into 0..n/2.
long long fold_index(long long k, int n);

}  // namespace swarmlab
