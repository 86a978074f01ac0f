#pragma once

#include <Eigen/Dense>

namespace etd::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column k pairs with values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `tol * max(1, ||A||_F)`. Throws Error{Numerical} if the input is not
/// square, not finite, or fails to converge within `max_sweeps`.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-12,
                            int max_sweeps = 100);

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Lower-triangular L with L*L^T = cov for a positive-semidefinite `cov`.
/// Eigenvalues in [-clamp_tol, 0] (relative to the largest) are treated as
/// zero; anything more negative raises Error{CholeskyFailure}.
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& cov,
                             double clamp_tol = 1e-10);

}  // namespace etd::linalg
