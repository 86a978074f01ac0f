#include "etd/estimators.hpp"

#include <cmath>

#include "etd/error.hpp"
#include "etd/linalg.hpp"

namespace etd {

namespace {

void check_shapes(const Eigen::MatrixXd& estimates,
                  const Eigen::VectorXd& measurement, const Network& net,
                  const ObservationSystem& sys) {
  if (net.size() != sys.agents() || estimates.rows() != sys.agents() ||
      estimates.cols() != sys.param_dim() ||
      measurement.size() != sys.total_dim())
    throw Error(ErrorCode::DimensionMismatch,
                "estimator inputs have inconsistent dimensions");
}

void require_finite(const Eigen::MatrixXd& m, long step) {
  if (!m.allFinite())
    throw Error(ErrorCode::NonFinite,
                "estimate became non-finite at step " + std::to_string(step),
                step);
}

}  // namespace

DistributedState make_distributed_state(const Eigen::MatrixXd& initial) {
  DistributedState s;
  s.t = 0;
  s.estimates = initial;
  s.mailbox.stored = Eigen::MatrixXd::Zero(initial.rows(), initial.cols());
  s.comm.resize(static_cast<std::size_t>(initial.rows()));
  for (Eigen::Index i = 0; i < initial.rows(); ++i) {
    auto& c = s.comm[static_cast<std::size_t>(i)];
    c.agent = static_cast<int>(i);
    broadcast(c, s.mailbox, initial.row(i).transpose(), 0);
  }
  return s;
}

std::vector<std::uint8_t> trigger_phase(DistributedState& state,
                                        const ScheduleParams& params,
                                        TriggerPolicy policy) {
  const auto n = static_cast<std::size_t>(state.estimates.rows());
  std::vector<std::uint8_t> fired(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    fired[i] = evaluate_trigger(state.comm[i],
                                state.estimates.row(static_cast<Eigen::Index>(i)).transpose(),
                                state.t, params, policy);
  for (std::size_t i = 0; i < n; ++i)
    if (fired[i])
      broadcast(state.comm[i], state.mailbox,
                state.estimates.row(static_cast<Eigen::Index>(i)).transpose(),
                state.t);
  return fired;
}

Eigen::MatrixXd consensus_innovation_update(
    const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& neighbor_values,
    const Eigen::VectorXd& measurement, double alpha_t, double beta_t,
    const Network& net, const ObservationSystem& sys) {
  check_shapes(estimates, measurement, net, sys);
  const int n = sys.param_dim();
  Eigen::MatrixXd next(estimates.rows(), estimates.cols());
  Eigen::VectorXd disagreement(n);
  for (int i = 0; i < sys.agents(); ++i) {
    const Eigen::VectorXd xi = estimates.row(i).transpose();
    disagreement.setZero();
    for (int j : net.neighbors(i))
      disagreement += neighbor_values.row(j).transpose() - xi;
    const Eigen::MatrixXd& h = sys.sensor(i);
    const Eigen::VectorXd residual =
        measurement.segment(sys.offset(i), sys.rows(i)) - h * xi;
    next.row(i) = (xi + beta_t * disagreement +
                   alpha_t * (h.transpose() * residual))
                      .transpose();
  }
  return next;
}

void distributed_step(DistributedState& state,
                      const Eigen::VectorXd& measurement,
                      const ScheduleParams& params, const Network& net,
                      const ObservationSystem& sys) {
  state.estimates = consensus_innovation_update(
      state.estimates, state.mailbox.stored, measurement,
      alpha(params, state.t), beta(params, state.t), net, sys);
  require_finite(state.estimates, state.t);
  ++state.t;
}

Eigen::VectorXd stacked_distributed_update(
    const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& stored,
    const Eigen::VectorXd& measurement, double alpha_t, double beta_t,
    const Network& net, const ObservationSystem& sys) {
  check_shapes(estimates, measurement, net, sys);
  const int n = sys.param_dim();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd adj = net.adjacency().cast<double>();
  const Eigen::MatrixXd lap =
      Eigen::MatrixXd(adj.rowwise().sum().asDiagonal()) - adj;
  const Eigen::MatrixXd dbar = sys.stacked_sensor_transpose();
  const Eigen::VectorXd x = stack(estimates);
  const Eigen::VectorXd xk = stack(stored);
  return x - beta_t * (linalg::kron(lap, eye) * x) +
         alpha_t * (dbar * (measurement - dbar.transpose() * x)) +
         beta_t * (linalg::kron(adj, eye) * (xk - x));
}

void time_driven_step(TimeDrivenState& state,
                      const Eigen::VectorXd& measurement,
                      const ScheduleParams& params, const Network& net,
                      const ObservationSystem& sys) {
  state.estimates = consensus_innovation_update(
      state.estimates, state.estimates, measurement, alpha(params, state.t),
      beta(params, state.t), net, sys);
  require_finite(state.estimates, state.t);
  ++state.t;
}

double centralized_gain(const CentralizedState& state) {
  return state.a_c /
         std::pow(static_cast<double>(state.t) + 1.0, state.tau_c);
}

void centralized_step(CentralizedState& state,
                      const Eigen::VectorXd& measurement,
                      const ObservationSystem& sys) {
  if (state.u.size() != sys.param_dim() ||
      measurement.size() != sys.total_dim())
    throw Error(ErrorCode::DimensionMismatch,
                "centralized inputs have inconsistent dimensions");
  Eigen::VectorXd innovation = Eigen::VectorXd::Zero(sys.param_dim());
  for (int i = 0; i < sys.agents(); ++i) {
    const Eigen::MatrixXd& h = sys.sensor(i);
    innovation += h.transpose() *
                  (measurement.segment(sys.offset(i), sys.rows(i)) -
                   h * state.u);
  }
  state.u += (centralized_gain(state) / sys.agents()) * innovation;
  if (!state.u.allFinite())
    throw Error(ErrorCode::NonFinite,
                "centralized estimate became non-finite at step " +
                    std::to_string(state.t),
                state.t);
  ++state.t;
}

Eigen::VectorXd stack(const Eigen::MatrixXd& rows) {
  Eigen::VectorXd out(rows.size());
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    out.segment(i * rows.cols(), rows.cols()) = rows.row(i).transpose();
  return out;
}

Eigen::MatrixXd unstack(const Eigen::VectorXd& stacked, int agents) {
  const Eigen::Index n = stacked.size() / agents;
  Eigen::MatrixXd out(agents, n);
  for (int i = 0; i < agents; ++i)
    out.row(i) = stacked.segment(i * n, n).transpose();
  return out;
}

}  // namespace etd
