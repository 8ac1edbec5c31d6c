#include "beltree/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace beltree {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw InvalidMatrixError(std::string(what) + " contains NaN or infinite entries");
    }
}

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) {
        throw InvalidMatrixError(std::string(what) + " contains NaN or infinite entries");
    }
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
    require_finite(m, "pseudo_inverse input");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return Matrix::Zero(m.cols(), m.rows());
    }
    if (rel_tol < 0.0) {
        rel_tol = std::numeric_limits<double>::epsilon() *
                  static_cast<double>(std::max(m.rows(), m.cols()));
    }
    const double cutoff = rel_tol * sv(0);
    Vector inv = Vector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix symmetrize(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeError("symmetrize requires a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    require_finite(m, "symmetrize input");
    return 0.5 * (m + m.transpose());
}

namespace {

// Left-looking Cholesky that skips (zeroes) columns whose pivot has been
// driven to ~0 by rank deficiency. Input must already be clean PSD.
Matrix skip_cholesky(const Matrix& v) {
    const Index n = v.rows();
    Matrix a = Matrix::Zero(n, n);
    const double max_diag = std::max(v.diagonal().maxCoeff(), 0.0);
    const double pivot_tol =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;
    for (Index j = 0; j < n; ++j) {
        double d = v(j, j);
        for (Index k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (d <= pivot_tol) continue;  // structurally zero column
        a(j, j) = std::sqrt(d);
        for (Index i = j + 1; i < n; ++i) {
            double s = v(i, j);
            for (Index k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / a(j, j);
        }
    }
    return a;
}

}  // namespace

Matrix psd_factor(const Matrix& v, double tol) {
    Matrix s = symmetrize(v);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (eig.info() != Eigen::Success) {
        throw InvalidMatrixError("eigendecomposition failed in psd_factor");
    }
    const Vector& lam = eig.eigenvalues();
    const double radius = std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
    if (radius == 0.0) {
        return Matrix::Zero(s.rows(), s.cols());
    }
    if (lam(0) < -tol * radius) {
        throw NotPsdError("matrix is indefinite: min eigenvalue " +
                          std::to_string(lam(0)) + " with spectral radius " +
                          std::to_string(radius));
    }
    Vector clamped = lam.cwiseMax(0.0);
    Matrix clean = symmetrize(eig.eigenvectors() * clamped.asDiagonal() *
                              eig.eigenvectors().transpose());
    return skip_cholesky(clean);
}

bool is_psd(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols() || !m.allFinite()) return false;
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (asym > rel_tol * scale) return false;
    return psd_margin(m) >= -rel_tol;
}

double psd_margin(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m));
    const Vector& lam = eig.eigenvalues();
    const double radius = std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
    if (radius == 0.0) return 0.0;
    return lam(0) / radius;
}

}  // namespace beltree
