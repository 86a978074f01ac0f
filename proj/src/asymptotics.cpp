#include "etd/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "etd/error.hpp"
#include "etd/linalg.hpp"

namespace etd {

Eigen::MatrixXd information_coupling(const Network& net,
                                     const ObservationSystem& sys) {
  const SpectralData sd = spectral_data(net);
  const int n = sys.param_dim();
  return linalg::kron(sd.laplacian, Eigen::MatrixXd::Identity(n, n)) +
         sys.block_information();
}

SpectralCondition spectral_condition(const Network& net,
                                     const ObservationSystem& sys,
                                     const ScheduleParams& params, long t_max,
                                     bool allow_disconnected, long dense_until,
                                     double growth) {
  if (net.size() != sys.agents())
    throw Error(ErrorCode::DimensionMismatch,
                "network and observation system disagree on N");
  if (!allow_disconnected && !is_connected(net))
    throw Error(ErrorCode::DomainError,
                "spectral condition requires a connected network");
  if (t_max < 0 || !(growth > 1.0))
    throw Error(ErrorCode::DomainError, "invalid scan parameters");

  const int n = sys.param_dim();
  const Eigen::MatrixXd lap =
      linalg::kron(spectral_data(net).laplacian, Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd info = sys.block_information();

  SpectralCondition out;
  out.t_max = t_max;
  out.base_min_eigenvalue = linalg::symmetric_eigenvalues(lap + info)[0];
  out.base_positive_definite = out.base_min_eigenvalue > 1e-12;

  std::optional<long> t_star;
  bool holds = true;
  double m0 = std::numeric_limits<double>::infinity();

  long t = 0;
  while (true) {
    const double a = alpha(params, t);
    const Eigen::VectorXd eig =
        linalg::symmetric_eigenvalues(beta(params, t) * lap + a * info);
    ++out.scanned_steps;
    const bool inside = eig[0] > 0.0 && eig[eig.size() - 1] < 1.0;
    if (!t_star && inside) {
      t_star = t;
      out.max_eig_at_t_star = eig[eig.size() - 1];
    }
    if (t_star) {
      holds = holds && inside;
      m0 = std::min(m0, eig[0] / a);
    }
    if (t >= t_max) break;
    long next = t + 1;
    if (t >= dense_until)
      next = std::max(next, static_cast<long>(std::ceil(t * growth)));
    t = std::min(next, t_max);
  }

  if (!t_star)
    throw Error(ErrorCode::NotFound,
                "no step up to t_max has all eigenvalues inside (0, 1)");
  out.t_star = *t_star;
  out.m0 = m0;
  out.holds_through_t_max = holds;
  return out;
}

std::vector<double> scalar_recursion(double z0, double a1, double a2,
                                     double delta1, double delta2,
                                     double delta0, long t_max) {
  auto fail = [](const char* what) {
    throw Error(ErrorCode::DomainError, std::string("scalar_recursion: ") + what);
  };
  if (z0 < 0.0) fail("z0 must be >= 0");
  if (!(a1 > 0.0) || a2 < 0.0) fail("need a1 > 0 and a2 >= 0");
  if (delta1 < 0.0 || delta1 > 1.0) fail("need 0 <= delta1 <= 1");
  if (delta2 < 0.0) fail("need delta2 >= 0");
  if (!(delta1 < delta2)) fail("need delta1 < delta2");
  if (delta0 < 0.0 || !(delta0 < delta2 - delta1))
    fail("need 0 <= delta0 < delta2 - delta1");
  if (delta1 == 1.0 && !(a1 > delta0)) fail("delta1 = 1 needs a1 > delta0");
  if (t_max < 0) fail("t_max must be >= 0");

  std::vector<double> scaled(static_cast<std::size_t>(t_max) + 1);
  double z = z0;
  for (long t = 0;; ++t) {
    const double tp1 = static_cast<double>(t) + 1.0;
    scaled[static_cast<std::size_t>(t)] = std::pow(tp1, delta0) * z;
    if (t == t_max) break;
    const double r1 = std::clamp(a1 / std::pow(tp1, delta1), 0.0, 1.0);
    const double r2 = a2 / std::pow(tp1, delta2);
    z = (1.0 - r1) * z + r2;
  }
  return scaled;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "lyapunov: shape mismatch");
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  // Column-major vec: vec(A X) = (I (x) A) vec X, vec(X A^T) = (A (x) I) vec X.
  const Eigen::MatrixXd op = linalg::kron(eye, a) + linalg::kron(a, eye);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(op);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularSystem, "lyapunov operator is singular");
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(
      Eigen::MatrixXd(q).data(), n * n);
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite())
    throw Error(ErrorCode::SingularSystem, "lyapunov solve is not finite");
  const Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  return 0.5 * (p + p.transpose());
}

AsymptoticCovariance covariance_terms(const ObservationSystem& sys,
                                      double a_c) {
  if (!(a_c > 0.0))
    throw Error(ErrorCode::DomainError, "a_c must be positive");
  const int n = sys.param_dim();
  const int n_agents = sys.agents();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (const auto& h : sys.sensors()) g += h.transpose() * h;

  AsymptoticCovariance out;
  out.a_c = a_c;
  out.sigma1 = -(a_c / n_agents) * g + 0.5 * eye;
  const Eigen::MatrixXd ones_kron =
      linalg::kron(Eigen::VectorXd::Ones(n_agents), eye);
  const Eigen::MatrixXd dbar = sys.stacked_sensor_transpose();
  out.s1 = ones_kron.transpose() * dbar * sys.noise_cov() *
           dbar.transpose() * ones_kron;
  out.s1 = 0.5 * (out.s1 + out.s1.transpose());
  out.sigma1_eigenvalues = linalg::symmetric_eigenvalues(out.sigma1);
  out.hurwitz = out.sigma1_eigenvalues.maxCoeff() < 0.0;
  return out;
}

AsymptoticCovariance asymptotic_covariance(const ObservationSystem& sys,
                                           double a_c) {
  AsymptoticCovariance out = covariance_terms(sys, a_c);
  if (!out.hurwitz)
    throw Error(ErrorCode::NotHurwitz,
                "sigma1 has a non-negative eigenvalue; need a_c > N / (2 "
                "lambda_min(G))");
  const double scale = a_c / sys.agents();
  const Eigen::MatrixXd forcing = scale * scale * out.s1;
  out.s_c = solve_lyapunov(out.sigma1, forcing);
  out.residual = (out.sigma1 * out.s_c + out.s_c * out.sigma1.transpose() +
                  forcing)
                     .norm();
  return out;
}

}  // namespace etd
