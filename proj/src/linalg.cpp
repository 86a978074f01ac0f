#include "etd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "etd/error.hpp"

namespace etd::linalg {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, double tol,
                            int max_sweeps) {
  if (input.rows() != input.cols())
    throw Error(ErrorCode::Numerical, "jacobi_eigen: matrix is not square");
  if (!input.allFinite())
    throw Error(ErrorCode::Numerical, "jacobi_eigen: non-finite entry");

  const Eigen::Index n = input.rows();
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, a.norm());

  int sweep = 0;
  while (off_diagonal_norm(a) > tol * scale) {
    if (sweep == max_sweeps)
      throw Error(ErrorCode::Numerical, "jacobi_eigen: no convergence");
    ++sweep;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Symmetric 2x2 Schur rotation annihilating a(p,q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  return jacobi_eigen(a).values;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& cov, double clamp_tol) {
  if (cov.rows() != cov.cols())
    throw Error(ErrorCode::CholeskyFailure, "covariance is not square");
  const Eigen::Index m = cov.rows();
  if (m == 0) return Eigen::MatrixXd(0, 0);
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() >
      clamp_tol * std::max(1.0, cov.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::CholeskyFailure, "covariance is not symmetric");

  const Eigen::VectorXd eig = symmetric_eigenvalues(cov);
  const double scale = std::max(1.0, eig.cwiseAbs().maxCoeff());
  if (eig.minCoeff() < -clamp_tol * scale)
    throw Error(ErrorCode::CholeskyFailure,
                "covariance is not positive semidefinite");

  // Outer-product Cholesky; a (numerically) zero pivot zeroes its column,
  // which is exact for a PSD matrix.
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  const double pivot_floor = clamp_tol * scale;
  for (Eigen::Index j = 0; j < m; ++j) {
    double d = cov(j, j) - l.row(j).head(j).squaredNorm();
    if (d <= pivot_floor) continue;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < m; ++i)
      l(i, j) = (cov(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
  }

  const double residual = (l * l.transpose() - cov).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * scale)
    throw Error(ErrorCode::CholeskyFailure,
                "semidefinite factorization lost accuracy");
  return l;
}

}  // namespace etd::linalg
