#pragma once

#include <complex>

#include <Eigen/Dense>

namespace freequiver {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// A square matrix is invertible iff sigma_min > kInvertibilityThreshold * sigma_max.
inline constexpr double kInvertibilityThreshold = 1e-10;
/// Default pass threshold for relative residuals.
inline constexpr double kDefaultTolerance = 1e-9;

/// Singular values in decreasing order; empty for empty matrices.
Eigen::VectorXd singular_values(const Matrix& m);

/// Operator 2-norm (largest singular value); 0 for empty matrices.
double op_norm(const Matrix& m);

/// ||a - b||_2 / (1 + max(||a||_2, ||b||_2)). Shapes must agree.
double relative_difference(const Matrix& a, const Matrix& b);

Matrix block_diag(const Matrix& a, const Matrix& b);

/// [[a, b], [c, d]] with the usual shape constraints.
Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);

/// Numerical rank cutoff used by nullspace computations when none is given:
/// 10 * max(rows, cols) * machine epsilon (relative to sigma_max).
double default_rank_tolerance(Index rows, Index cols);

/// Orthonormal basis (as columns) of {v : m v ~ 0}: right singular vectors with
/// sigma <= rel_tol * sigma_max, plus the directions beyond min(rows, cols).
Matrix nullspace(const Matrix& m, double rel_tol);

/// Square and sigma_min > threshold * sigma_max. The 0x0 matrix is invertible.
bool is_invertible(const Matrix& m, double threshold = kInvertibilityThreshold);

}  // namespace freequiver
