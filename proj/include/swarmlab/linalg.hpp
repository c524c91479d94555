#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <vector>

namespace swarmlab {

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

/// Eigenvalues of a complex 4x4 matrix.
///
/// Exactly decoupled eigenvalues (a row or column whose off-diagonal part is
/// zero) are split off first, so structural zeros come back as exact zeros.
/// The remainder goes through Hessenberg reduction and single-shift complex QR.
/// Throws NumericalError on non-finite input or when QR fails to converge.
std::array<Complex, 4> eig4(const Matrix4c& mat);

/// Largest absolute entry.
double max_norm(const Matrix4c& mat);
double max_norm(const Eigen::MatrixXd& mat);

/// Smallest singular value of (mat - lambda I).
double min_singular_value_shifted(const Matrix4c& mat, Complex lambda);

/// General real eigenvalues (Eigen's real Schur path). n <= 128 by contract.
std::vector<Complex> dense_eigvals(const Eigen::MatrixXd& mat);

/// Real symmetric eigenvalues sorted descending.
std::vector<double> dense_eigvals_symmetric(const Eigen::MatrixXd& mat);

}  // namespace swarmlab
