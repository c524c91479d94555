#pragma once

// Reduced 4x4 linearizations of flock, Cucker-Smale flock and mill rings about
// the perturbation h_j = xi+ e^{i m theta_j} + xi- e^{-i m theta_j}, with
// eigenvalue classification per mode and envelopes over m = 2..m_max.

#include "swarmlab/linalg.hpp"
#include "swarmlab/potentials.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace swarmlab {

enum class ModelKind { Flock, FlockCS, Mill };

/// Invalid is only produced by region scans (cells whose radius solve failed).
enum class Classification { Stable, Unstable, Marginal, Invalid };

std::string to_string(ModelKind kind);
std::string to_string(Classification c);
ModelKind parse_model(const std::string& name);

struct ShapeMatrix {
  double i1_plus = 0.0;   ///< I1(m)
  double i2 = 0.0;        ///< I2(m) = I2(-m)
  double i1_minus = 0.0;  ///< I1(-m)

  Eigen::Matrix2d matrix() const;
};

struct ModeParams {
  double a = 0.0;
  double b = 0.0;
  int n = 0;
  int m = 0;
  double alpha = 0.0;
  double omega = 0.0;
  double gamma = 0.0;
  double radius = 0.0;
};

struct ModeMatrix {
  Matrix4c entries;
  ModelKind model = ModelKind::Flock;
  ModeParams params;
};

struct SpectralReport {
  int m = 0;
  std::array<Complex, 4> eigenvalues{};
  double max_real = 0.0;
  double tolerance = 0.0;
  Classification classification = Classification::Marginal;
};

/// (G1, G2) at angle pi p / N for the power law (a, b).
std::pair<double, double> g1_g2(double a, double b, double radius, int n, int p);

/// Direct O(N) sums. m may be negative.
double i1(double a, double b, double radius, int n, int m);
double i2(double a, double b, double radius, int n, int m);
/// sign = +1 or -1.
double j_pm(double gamma, double radius, int n, int m, int sign);

ShapeMatrix shape_matrix_at(double a, double b, double radius, int n, int m);
/// Solves the ring radius for the given speed (0 for flocks) first.
ShapeMatrix shape_matrix(double a, double b, int n, int m, double speed);

/// (det, trace).
std::pair<double, double> det_trace(const ShapeMatrix& sm);

Matrix4c assemble_flock(const ShapeMatrix& sm, double alpha);
Matrix4c assemble_cs(const ShapeMatrix& sm, double j_plus, double j_minus);
Matrix4c assemble_mill(const ShapeMatrix& sm, double alpha, double omega);

ModeMatrix flock_mode_matrix(double a, double b, int n, int m, const Propulsion& prop);
ModeMatrix cs_flock_mode_matrix(double a, double b, int n, int m, double gamma);
ModeMatrix mill_mode_matrix(double a, double b, int n, int m, double alpha, double speed);

/// Structurally forced zero eigenvalues: only at m = 1 (flock 1, CS 2, mill none).
int forced_zero_count(ModelKind model, int m);

/// 1e-8 * max(1, max-norm).
double default_tolerance(const Matrix4c& mat);

Classification classify(const std::array<Complex, 4>& eigenvalues, ModelKind model, int m,
                        double tol);

SpectralReport analyze(const ModeMatrix& mat);

struct ModelSpec {
  ModelKind kind = ModelKind::Flock;
  double a = 0.0;
  double b = 0.0;
  int n = 0;
  double alpha = 1.0;
  double speed = 1.0;  ///< mill ring speed; flock/CS: metadata only
  double gamma = 1.0;  ///< CS only
};

struct Envelope {
  Classification classification = Classification::Marginal;
  SpectralReport worst;
  int critical_mode = 0;
  double radius = 0.0;
  std::vector<SpectralReport> modes;  ///< empty unless requested
};

/// Modes 2..m_max (m_max <= 0 means floor(N/2)). Sums via one FFT per ring.
Envelope mode_envelope(const ModelSpec& spec, int m_max = 0, bool keep_table = false);

/// Same, at a ring radius supplied by the caller.
Envelope mode_envelope_at(const ModelSpec& spec, double radius, int m_max, bool keep_table);

struct DetAsymptotics {
  std::vector<std::pair<int, double>> table;  ///< (m, det M(m))
  double slope = 0.0;                         ///< least squares on log|det| vs log m
};

DetAsymptotics det_asymptotics(double a, double b, int n, const std::vector<int>& m_values);

}  // namespace swarmlab
