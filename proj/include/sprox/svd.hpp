#pragma once

// Small dense SVD via one-sided Jacobi rotations.
//
// Sizes in this project stay at desk scale (<= 64), so a self-contained
// cyclic Jacobi sweep is accurate and fast enough. Output conventions:
//   * sigma is nonincreasing, length min(m, n);
//   * U is a full m x m orthogonal matrix, V a full n x n orthogonal matrix
//     (columns for zero singular values are kept);
//   * each triplet is signed so that the largest-magnitude entry of the left
//     singular vector is positive (ties go to the lowest row index).

#include <Eigen/Dense>

namespace sprox {

struct SvdResult {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;
};

// Thin view that drops the triplets with zero singular value.
struct ReducedSvd {
  Eigen::MatrixXd U;  // m x r
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;  // n x r
};

// Throws InvalidInput for empty or non-finite input and NumericalError if
// the sweeps fail to converge.
SvdResult full_svd(const Eigen::MatrixXd& M);

ReducedSvd reduced_svd(const SvdResult& svd);

Eigen::VectorXd singular_values(const Eigen::MatrixXd& M);

// U * Diag(diag) * V^T with a rectangular diagonal sized from U and V.
Eigen::MatrixXd compose_svd(const Eigen::MatrixXd& U,
                            const Eigen::VectorXd& diag,
                            const Eigen::MatrixXd& V);

}  // namespace sprox
