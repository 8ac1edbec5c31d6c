#pragma once

#include <Eigen/Dense>

#include "beltree/error.hpp"

namespace beltree {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sentinel: pick the cutoff automatically as eps * max(rows, cols) * sigma_max.
inline constexpr double kAutoTol = -1.0;

/// Eigenvalues in [-kPsdClampTol * spectral_radius, 0) are treated as zero;
/// anything below that is rejected as indefinite.
inline constexpr double kPsdClampTol = 1e-10;

/// Relative tolerance used by structural PSD checks on user-supplied and
/// propagated variance matrices.
inline constexpr double kPsdCheckTol = 1e-8;

void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

/// Moore-Penrose generalised inverse via SVD. Singular values below
/// rel_tol * sigma_max are treated as zero.
Matrix pseudo_inverse(const Matrix& m, double rel_tol = kAutoTol);

/// Lower-triangular A with A A^T = v, valid for singular PSD input
/// (rank-deficient columns come out as zero). Indefinite input throws.
Matrix psd_factor(const Matrix& v, double tol = kPsdClampTol);

/// (m + m^T) / 2. Throws on non-square input.
Matrix symmetrize(const Matrix& m);

/// True iff m is symmetric with all eigenvalues >= -rel_tol * spectral_radius.
bool is_psd(const Matrix& m, double rel_tol = kPsdCheckTol);

/// Smallest eigenvalue scaled by the spectral radius; 0 for the zero matrix.
/// Negative values measure how far from PSD the matrix is.
double psd_margin(const Matrix& m);

}  // namespace beltree
