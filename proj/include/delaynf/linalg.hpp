#pragma once

#include <algorithm>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace delaynf::linalg {

template <class Matrix>
Eigen::VectorXd singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Eigen::VectorXd();
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

// Number of singular values strictly above cutoff.
inline int count_above(const Eigen::VectorXd& sigma, double cutoff) {
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) r += sigma(i) > cutoff ? 1 : 0;
  return r;
}

// Rank with cutoff rel_tol * sigma_max.
template <class Matrix>
int numerical_rank(const Matrix& a, double rel_tol) {
  const Eigen::VectorXd sigma = singular_values(a);
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  return count_above(sigma, rel_tol * sigma(0));
}

// Minimal-norm least-squares solution of a x = b, discarding singular values
// at or below `cutoff` (absolute).
template <class Matrix, class Vector>
Vector min_norm_solve(const Matrix& a, const Vector& b, double cutoff) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  Vector utb = svd.matrixU().adjoint() * b;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    utb(i) = sigma(i) > cutoff ? utb(i) / sigma(i) : typename Vector::Scalar(0);
  }
  return svd.matrixV() * utb;
}

// Orthonormal basis (as columns) of the null space, cutoff rel_tol * sigma_max.
template <class Matrix>
Matrix null_space(const Matrix& a, double rel_tol) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double cutoff = sigma.size() ? rel_tol * sigma(0) : 0.0;
  const int rank = count_above(sigma, cutoff);
  return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace delaynf::linalg
