#pragma once

#include <Eigen/Dense>
#include <vector>

namespace etd {

/// Undirected, unweighted communication graph without self-loops.
class Network {
 public:
  int size() const { return static_cast<int>(neighbors_.size()); }
  const Eigen::MatrixXi& adjacency() const { return adjacency_; }
  const std::vector<int>& neighbors(int agent) const {
    return neighbors_.at(static_cast<std::size_t>(agent));
  }
  int degree(int agent) const {
    return static_cast<int>(neighbors(agent).size());
  }

 private:
  friend Network build_network(const Eigen::MatrixXi& adjacency);
  Eigen::MatrixXi adjacency_;
  std::vector<std::vector<int>> neighbors_;
};

struct SpectralData {
  Eigen::MatrixXd laplacian;
  Eigen::MatrixXd degree;
  Eigen::VectorXd eigenvalues;  // ascending
  double lambda2 = 0.0;         // 0 when the graph has a single node
  bool not_connected = false;   // set when lambda2 is undefined (N = 1)
};

/// Validates a 0/1 adjacency matrix. Throws Error with NonSymmetric,
/// SelfLoop, Empty, or DomainError (non-square / non-binary entries).
Network build_network(const Eigen::MatrixXi& adjacency);

SpectralData spectral_data(const Network& net);

/// Algebraic-connectivity test: lambda2 > tol * max(1, lambda_max).
/// A single node is reported as not connected.
bool is_connected(const Network& net, double tol = 1e-9);
bool is_connected(const SpectralData& spectral, double tol = 1e-9);

}  // namespace etd
