#include "etd/observation.hpp"

#include <cmath>

#include "etd/error.hpp"
#include "etd/linalg.hpp"

namespace etd {

ObservationSystem::ObservationSystem(Eigen::VectorXd theta,
                                     std::vector<Eigen::MatrixXd> sensors,
                                     Eigen::MatrixXd noise_cov)
    : theta_(std::move(theta)),
      sensors_(std::move(sensors)),
      noise_cov_(std::move(noise_cov)) {
  if (sensors_.empty())
    throw Error(ErrorCode::DimensionMismatch, "no sensors given");
  const Eigen::Index n = theta_.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "theta is empty");
  for (std::size_t i = 0; i < sensors_.size(); ++i) {
    if (sensors_[i].cols() != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "sensor " + std::to_string(i) + " has " +
                      std::to_string(sensors_[i].cols()) +
                      " columns, theta has length " + std::to_string(n));
    if (sensors_[i].rows() == 0)
      throw Error(ErrorCode::DimensionMismatch,
                  "sensor " + std::to_string(i) + " has no rows");
    offsets_.push_back(total_dim_);
    total_dim_ += static_cast<int>(sensors_[i].rows());
  }
  if (noise_cov_.rows() != total_dim_ || noise_cov_.cols() != total_dim_)
    throw Error(ErrorCode::DimensionMismatch,
                "noise covariance must be " + std::to_string(total_dim_) +
                    "x" + std::to_string(total_dim_));
  noise_chol_ = linalg::psd_cholesky(noise_cov_);
}

Eigen::MatrixXd ObservationSystem::stacked_sensor_transpose() const {
  const int n = param_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(agents() * n, total_dim_);
  for (int i = 0; i < agents(); ++i)
    out.block(i * n, offset(i), n, rows(i)) = sensor(i).transpose();
  return out;
}

Eigen::MatrixXd ObservationSystem::block_information() const {
  const int n = param_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(agents() * n, agents() * n);
  for (int i = 0; i < agents(); ++i)
    out.block(i * n, i * n, n, n) = sensor(i).transpose() * sensor(i);
  return out;
}

Eigen::VectorXd ObservationSystem::noise_free_measurement() const {
  Eigen::VectorXd y(total_dim_);
  for (int i = 0; i < agents(); ++i)
    y.segment(offset(i), rows(i)) = sensor(i) * theta_;
  return y;
}

void GaussianNoiseStream::fill_standard(std::span<double> out) {
  for (double& v : out) v = dist_(engine_);
}

StudentTNoiseStream::StudentTNoiseStream(std::uint64_t seed, double dof)
    : engine_(seed), dist_(dof), scale_(0.0) {
  if (!(dof > 2.0))
    throw Error(ErrorCode::DomainError,
                "student-t noise needs dof > 2 for finite variance");
  scale_ = std::sqrt((dof - 2.0) / dof);
}

void StudentTNoiseStream::fill_standard(std::span<double> out) {
  for (double& v : out) v = scale_ * dist_(engine_);
}

std::unique_ptr<NoiseStream> make_noise_stream(NoiseKind kind,
                                               std::uint64_t seed,
                                               double dof) {
  switch (kind) {
    case NoiseKind::gaussian:
      return std::make_unique<GaussianNoiseStream>(seed);
    case NoiseKind::student_t:
      return std::make_unique<StudentTNoiseStream>(seed, dof);
  }
  throw Error(ErrorCode::DomainError, "unknown noise kind");
}

Eigen::VectorXd sample_measurements(const ObservationSystem& sys,
                                    NoiseStream& noise) {
  Eigen::VectorXd z(sys.total_dim());
  noise.fill_standard(std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
  return sys.noise_free_measurement() +
         sys.noise_chol().triangularView<Eigen::Lower>() * z;
}

Gramian gramian(const ObservationSystem& sys, double tol) {
  const int n = sys.param_dim();
  Gramian out;
  out.matrix = Eigen::MatrixXd::Zero(n, n);
  for (const auto& h : sys.sensors()) out.matrix += h.transpose() * h;
  const Eigen::VectorXd eig = linalg::symmetric_eigenvalues(out.matrix);
  out.min_eigenvalue = eig[0];
  out.max_eigenvalue = eig[n - 1];
  out.full_rank = out.min_eigenvalue > tol * out.max_eigenvalue;
  return out;
}

}  // namespace etd
