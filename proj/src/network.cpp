#include "etd/network.hpp"

#include <algorithm>

#include "etd/error.hpp"
#include "etd/linalg.hpp"

namespace etd {

Network build_network(const Eigen::MatrixXi& adjacency) {
  if (adjacency.rows() != adjacency.cols())
    throw Error(ErrorCode::DomainError, "adjacency matrix is not square");
  const Eigen::Index n = adjacency.rows();
  if (n == 0) throw Error(ErrorCode::Empty, "network has no agents");

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const int v = adjacency(i, j);
      if (v != 0 && v != 1)
        throw Error(ErrorCode::DomainError,
                    "adjacency entries must be 0 or 1");
      if (v != adjacency(j, i))
        throw Error(ErrorCode::NonSymmetric,
                    "adjacency is not symmetric at (" + std::to_string(i) +
                        "," + std::to_string(j) + ")");
    }
    if (adjacency(i, i) != 0)
      throw Error(ErrorCode::SelfLoop,
                  "self-loop at agent " + std::to_string(i));
  }

  Network net;
  net.adjacency_ = adjacency;
  net.neighbors_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (adjacency(i, j) == 1)
        net.neighbors_[static_cast<std::size_t>(i)].push_back(
            static_cast<int>(j));
  return net;
}

SpectralData spectral_data(const Network& net) {
  const int n = net.size();
  SpectralData out;
  out.degree = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) out.degree(i, i) = net.degree(i);
  out.laplacian = out.degree - net.adjacency().cast<double>();
  out.eigenvalues = linalg::symmetric_eigenvalues(out.laplacian);
  if (n < 2) {
    out.lambda2 = 0.0;
    out.not_connected = true;
  } else {
    out.lambda2 = out.eigenvalues[1];
  }
  return out;
}

bool is_connected(const SpectralData& spectral, double tol) {
  if (spectral.not_connected || spectral.eigenvalues.size() < 2) return false;
  const double lmax = spectral.eigenvalues[spectral.eigenvalues.size() - 1];
  return spectral.lambda2 > tol * std::max(1.0, lmax);
}

bool is_connected(const Network& net, double tol) {
  return is_connected(spectral_data(net), tol);
}

}  // namespace etd
