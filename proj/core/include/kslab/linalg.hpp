#pragma once

#include "kslab/matrix.hpp"

#include <optional>
#include <vector>

namespace kslab {

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Returns std::nullopt when the input is not (numerically) positive definite.
std::optional<Matrix> cholesky(const Matrix& a);

/// Solves L * y = b for lower-triangular L.
std::vector<double> forward_substitute(const Matrix& l, const std::vector<double>& b);

/// Solves L^T * x = y for lower-triangular L.
std::vector<double> backward_substitute(const Matrix& l, const std::vector<double>& y);

/// Solves A * x = b given the Cholesky factor L of A.
std::vector<double> cholesky_solve(const Matrix& l, const std::vector<double>& b);

/// log det(A) = 2 * sum log L_ii given the Cholesky factor L of A.
double cholesky_log_det(const Matrix& l);

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Deterministic and
/// accurate at the small sizes used here; eigenvalues returned ascending.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-14, int max_sweeps = 64);

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues
/// below -tol are rejected, tiny negatives are clamped to zero.
Matrix psd_sqrt(const Matrix& a, double tol = 1e-9);

/// Largest singular value. Power iteration on the Gram operator with relative
/// tolerance 1e-10; matrices with min dimension <= 2 and diagonal matrices
/// take an exact closed-form path.
double spectral_norm(const Matrix& a);

}  // namespace kslab
