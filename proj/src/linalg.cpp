#include "freequiver/linalg.hpp"

#include <algorithm>
#include <limits>

#include "freequiver/errors.hpp"

namespace freequiver {

Eigen::VectorXd singular_values(const Matrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

double relative_difference(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("relative_difference: shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
  if (a.size() == 0) return 0.0;
  return op_norm(a - b) / (1.0 + std::max(op_norm(a), op_norm(b)));
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() ||
      b.cols() != d.cols()) {
    throw ShapeError("block2x2: incompatible block shapes");
  }
  Matrix out(a.rows() + c.rows(), a.cols() + b.cols());
  out << a, b, c, d;
  return out;
}

double default_rank_tolerance(Index rows, Index cols) {
  return 10.0 * static_cast<double>(std::max<Index>({rows, cols, 1})) *
         std::numeric_limits<double>::epsilon();
}

Matrix nullspace(const Matrix& m, double rel_tol) {
  const Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rel_tol * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

bool is_invertible(const Matrix& m, double threshold) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const Eigen::VectorXd sv = singular_values(m);
  return sv(sv.size() - 1) > threshold * sv(0);
}

}  // namespace freequiver
