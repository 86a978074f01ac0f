#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace etd {

/// Linear observation model y_i(t) = H_i theta + v_i(t) over N agents.
///
/// The joint noise V(t) = [v_1; ...; v_N] has covariance R_v, which may be
/// spatially correlated and singular. Per-agent blocks are views into the
/// stacked M-dimensional measurement vector.
class ObservationSystem {
 public:
  /// Throws DimensionMismatch on inconsistent shapes and CholeskyFailure if
  /// `noise_cov` is not symmetric positive semidefinite.
  ObservationSystem(Eigen::VectorXd theta, std::vector<Eigen::MatrixXd> sensors,
                    Eigen::MatrixXd noise_cov);

  int agents() const { return static_cast<int>(sensors_.size()); }
  int param_dim() const { return static_cast<int>(theta_.size()); }
  int total_dim() const { return total_dim_; }

  const Eigen::VectorXd& theta() const { return theta_; }
  const std::vector<Eigen::MatrixXd>& sensors() const { return sensors_; }
  const Eigen::MatrixXd& sensor(int i) const {
    return sensors_.at(static_cast<std::size_t>(i));
  }
  int offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  int rows(int i) const { return static_cast<int>(sensor(i).rows()); }

  const Eigen::MatrixXd& noise_cov() const { return noise_cov_; }
  const Eigen::MatrixXd& noise_chol() const { return noise_chol_; }
  Eigen::MatrixXd agent_noise_cov(int i) const {
    return noise_cov_.block(offset(i), offset(i), rows(i), rows(i));
  }

  /// blockdiag(H_1^T, ..., H_N^T), shape (N n) x M.
  Eigen::MatrixXd stacked_sensor_transpose() const;
  /// blockdiag(H_1^T H_1, ..., H_N^T H_N), shape (N n) x (N n).
  Eigen::MatrixXd block_information() const;
  /// Noise-free stacked measurement [H_1 theta; ...; H_N theta].
  Eigen::VectorXd noise_free_measurement() const;

 private:
  Eigen::VectorXd theta_;
  std::vector<Eigen::MatrixXd> sensors_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
  Eigen::MatrixXd noise_cov_;
  Eigen::MatrixXd noise_chol_;
};

enum class NoiseKind { gaussian, student_t };

/// Source of i.i.d. zero-mean, unit-variance scalar draws. Each stream owns
/// its engine; one stream per simulation or Monte Carlo replication.
class NoiseStream {
 public:
  virtual ~NoiseStream() = default;
  virtual void fill_standard(std::span<double> out) = 0;
};

class GaussianNoiseStream final : public NoiseStream {
 public:
  explicit GaussianNoiseStream(std::uint64_t seed) : engine_(seed) {}
  void fill_standard(std::span<double> out) override;

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// Student-t draws rescaled to unit variance; needs dof > 2. Has finite
/// moments of order < dof, so it exercises the (2+eps)-moment regime.
class StudentTNoiseStream final : public NoiseStream {
 public:
  StudentTNoiseStream(std::uint64_t seed, double dof);
  void fill_standard(std::span<double> out) override;

 private:
  std::mt19937_64 engine_;
  std::student_t_distribution<double> dist_;
  double scale_;
};

std::unique_ptr<NoiseStream> make_noise_stream(NoiseKind kind,
                                               std::uint64_t seed,
                                               double dof = 5.0);

/// Y(t) = D_H^T Theta + chol(R_v) z with z drawn from `noise`.
Eigen::VectorXd sample_measurements(const ObservationSystem& sys,
                                    NoiseStream& noise);

struct Gramian {
  Eigen::MatrixXd matrix;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool full_rank = false;
};

/// G = sum_i H_i^T H_i; full rank iff lambda_min > tol * lambda_max.
Gramian gramian(const ObservationSystem& sys, double tol = 1e-9);

}  // namespace etd
