#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's numerical code paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

namespace etd::oracle {

// Determinant by full permutation expansion (n <= 8).
inline double permutation_det(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double det = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inversions;
    double prod = (inversions % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[static_cast<std::size_t>(i)]);
    det += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

// Coefficients c_0..c_n of det(lambda I - A) via interpolation of the
// brute-force determinant at n+1 integer nodes.
inline Eigen::VectorXd characteristic_polynomial(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd vander(n + 1, n + 1);
  Eigen::VectorXd values(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double x = k;
    for (int p = 0; p <= n; ++p) vander(k, p) = std::pow(x, p);
    values[k] = permutation_det(x * Eigen::MatrixXd::Identity(n, n) - a);
  }
  return vander.fullPivLu().solve(values);
}

inline bool bfs_connected(const Eigen::MatrixXi& adj) {
  const int n = static_cast<int>(adj.rows());
  if (n < 2) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w = 0; w < n; ++w)
      if (adj(v, w) && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        ++count;
        q.push(w);
      }
  }
  return count == n;
}

inline Eigen::MatrixXi random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution edge(p);
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (edge(rng)) adj(i, j) = adj(j, i) = 1;
  return adj;
}

// exp(A) by scaling and squaring with a degree-12 Taylor polynomial.
inline Eigen::MatrixXd expm_taylor12(const Eigen::MatrixXd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd scaled = a / std::pow(2.0, squarings);
  const auto n = a.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 12; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// c * int_0^inf e^{A v} Q e^{A^T v} dv by composite Simpson on [0, V], with V
// chosen so that ||e^{A V}||^2 ||Q|| < 1e-14.
inline Eigen::MatrixXd lyapunov_integral(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& q, double c,
                                         double h = 1e-3) {
  const Eigen::MatrixXd step = expm_taylor12(a * h);
  const double qn = std::max(q.norm(), 1e-300);
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  long k = 0;
  // Integrate in Simpson pairs until the integrand is negligible.
  while (true) {
    const Eigen::MatrixXd f0 = e * q * e.transpose();
    const Eigen::MatrixXd e1 = step * e;
    const Eigen::MatrixXd e2 = step * e1;
    const Eigen::MatrixXd f1 = e1 * q * e1.transpose();
    const Eigen::MatrixXd f2 = e2 * q * e2.transpose();
    acc += (h / 3.0) * (f0 + 4.0 * f1 + f2);
    e = e2;
    k += 2;
    if (e.squaredNorm() * qn < 1e-14 || k > 100'000'000) break;
  }
  return c * acc;
}

}  // namespace etd::oracle
