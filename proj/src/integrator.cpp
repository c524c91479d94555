#include "swarmlab/integrator.hpp"

#include "swarmlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swarmlab {

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;

constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;
constexpr double kAlpha = 0.7 / 5.0;
constexpr double kBeta = 0.4 / 5.0;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                  double rtol, double atol) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / sc);
  }
  return worst;
}

double initial_step(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, double rtol, double atol, double span,
                    IntegratorStats& stats) {
  Eigen::VectorXd sc = (atol + rtol * y0.array().abs()).matrix();
  const double d0 = (y0.array() / sc.array()).matrix().norm() / std::sqrt(double(y0.size()));
  const double d1 = (f0.array() / sc.array()).matrix().norm() / std::sqrt(double(y0.size()));
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  Eigen::VectorXd y1 = y0 + h0 * f0;
  Eigen::VectorXd f1(y0.size());
  rhs(t0 + h0, y1, f1);
  ++stats.evaluations;
  const double d2 =
      ((f1 - f0).array() / sc.array()).matrix().norm() / std::sqrt(double(y0.size())) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

IntegratorStats integrate_dp5(const OdeRhs& rhs, double t0, Eigen::VectorXd& y, double t1,
                              const std::vector<double>& sample_times, const OdeObserver& observe,
                              const IntegratorOptions& opts) {
  if (!(t1 > t0)) throw DomainError("integrate_dp5: t1 must exceed t0");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw DomainError("integrate_dp5: tolerances must be positive");
  if (!y.allFinite()) throw NumericalError("integrate_dp5: non-finite initial state");
  for (size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 || sample_times[i] > t1 || (i && sample_times[i] < sample_times[i - 1])) {
      throw DomainError("integrate_dp5: sample times must be ascending inside [t0, t1]");
    }
  }

  IntegratorStats stats;
  const Eigen::Index n = y.size();
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  Eigen::VectorXd r2(n), r3(n), r4(n), r5(n), yout(n);

  rhs(t0, y, k1);
  ++stats.evaluations;
  size_t next_sample = 0;
  while (next_sample < sample_times.size() && sample_times[next_sample] == t0) {
    observe(t0, y);
    ++next_sample;
  }

  const double span = t1 - t0;
  const double h_min = 1e-12 * std::abs(t1);
  double h = opts.initial_step > 0.0 ? opts.initial_step
                                     : initial_step(rhs, t0, y, k1, opts.rtol, opts.atol, span, stats);
  h = std::min(h, opts.max_step);
  double t = t0;
  double err_prev = 1e-4;
  bool rejected_last = false;

  while (t < t1) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      throw NumericalError("integrate_dp5: maximum number of steps exceeded");
    }
    bool last = false;
    if (t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    if (h < h_min && !last) {
      std::ostringstream os;
      os << "integrate_dp5: step size underflow at t=" << t << " (h=" << h << ")";
      throw NumericalError(os.str());
    }

    ytmp = y + h * a21 * k1;
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, ynew, k7);
    stats.evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = error_norm(err, y, ynew, opts.rtol, opts.atol);
    if (!std::isfinite(en)) en = 1e10;

    if (en <= 1.0) {
      const double tnew = last ? t1 : t + h;
      if (!ynew.allFinite()) throw NumericalError("integrate_dp5: non-finite state");
      if (next_sample < sample_times.size() && sample_times[next_sample] <= tnew) {
        r2 = ynew - y;
        r3 = h * k1 - r2;
        r4 = r2 - h * k7 - r3;
        r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next_sample < sample_times.size() && sample_times[next_sample] <= tnew) {
          const double ts = sample_times[next_sample];
          if (ts == tnew) {
            observe(ts, ynew);
          } else {
            const double th = (ts - t) / h;
            const double th1 = 1.0 - th;
            yout = y + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
            observe(ts, yout);
          }
          ++next_sample;
        }
      }
      double fac = kSafety * std::pow(std::max(en, 1e-10), -kAlpha) * std::pow(err_prev, kBeta);
      fac = std::clamp(fac, kFacMin, kFacMax);
      if (rejected_last) fac = std::min(fac, 1.0);
      err_prev = std::max(en, 1e-4);
      y.swap(ynew);
      k1.swap(k7);
      t = tnew;
      ++stats.accepted;
      stats.last_step = h;
      rejected_last = false;
      h = std::min(h * fac, opts.max_step);
    } else {
      const double fac = std::max(kFacMin, kSafety * std::pow(en, -1.0 / 5.0));
      h *= fac;
      ++stats.rejected;
      rejected_last = true;
    }
  }
  return stats;
}

}  // namespace swarmlab
