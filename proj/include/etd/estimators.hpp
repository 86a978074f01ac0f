#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "etd/event_engine.hpp"
#include "etd/network.hpp"
#include "etd/observation.hpp"
#include "etd/schedule.hpp"

namespace etd {

struct DistributedState {
  long t = 0;
  Eigen::MatrixXd estimates;  // N x n, row i = x_i(t)
  std::vector<AgentCommState> comm;
  MailboxView mailbox;
};

struct TimeDrivenState {
  long t = 0;
  Eigen::MatrixXd estimates;
};

struct CentralizedState {
  long t = 0;
  Eigen::VectorXd u;
  double a_c = 1.0;
  double tau_c = 1.0;
};

/// State at t = 0 with every agent's initial estimate already broadcast.
DistributedState make_distributed_state(const Eigen::MatrixXd& initial);

/// Trigger evaluation followed by broadcast for every agent at step
/// `state.t`; returns per-agent flags. All agents decide against their
/// pre-broadcast estimates before any mailbox entry changes.
std::vector<std::uint8_t> trigger_phase(DistributedState& state,
                                        const ScheduleParams& params,
                                        TriggerPolicy policy);

/// x_i + beta * sum_{j in N_i} (neighbor_values_j - x_i)
///     + alpha * H_i^T (y_i - H_i x_i)  for every agent.
///
/// Shared kernel of the event-triggered (neighbor_values = mailbox) and
/// time-driven (neighbor_values = estimates) updates.
Eigen::MatrixXd consensus_innovation_update(
    const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& neighbor_values,
    const Eigen::VectorXd& measurement, double alpha_t, double beta_t,
    const Network& net, const ObservationSystem& sys);

/// Event-triggered update using the post-broadcast mailbox. Advances t.
/// Throws Error{NonFinite} carrying the step index on divergence.
void distributed_step(DistributedState& state,
                      const Eigen::VectorXd& measurement,
                      const ScheduleParams& params, const Network& net,
                      const ObservationSystem& sys);

/// The same update in stacked Kronecker form:
///   X+ = X - beta (L (x) I_n) X + alpha Dbar_H (Y - Dbar_H^T X)
///          + beta (A (x) I_n)(X(t_k) - X).
/// Returns the stacked N n-vector; used to cross-check the per-agent form.
Eigen::VectorXd stacked_distributed_update(
    const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& stored,
    const Eigen::VectorXd& measurement, double alpha_t, double beta_t,
    const Network& net, const ObservationSystem& sys);

void time_driven_step(TimeDrivenState& state,
                      const Eigen::VectorXd& measurement,
                      const ScheduleParams& params, const Network& net,
                      const ObservationSystem& sys);

double centralized_gain(const CentralizedState& state);

/// u+ = u + (alpha_c(t)/N) sum_i H_i^T (y_i - H_i u).
void centralized_step(CentralizedState& state,
                      const Eigen::VectorXd& measurement,
                      const ObservationSystem& sys);

Eigen::VectorXd stack(const Eigen::MatrixXd& rows);
Eigen::MatrixXd unstack(const Eigen::VectorXd& stacked, int agents);

}  // namespace etd
