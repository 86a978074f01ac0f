#pragma once

#include <Eigen/Dense>
#include <vector>

#include "etd/schedule.hpp"

namespace etd {

/// How broadcast decisions are made after the forced t = 0 broadcast.
enum class TriggerPolicy {
  event,   // broadcast iff ||x_i(t) - last broadcast|| > 1/(t+1)^rho_i
  always,  // threshold -inf: broadcast every step
  never,   // threshold +inf: keep the t = 0 broadcast forever
};

struct AgentCommState {
  int agent = 0;
  Eigen::VectorXd last_broadcast;
  long last_trigger_time = 0;
  long trigger_count = 0;
  std::vector<long> trigger_times;  // strictly increasing
};

/// Latest broadcast of every agent; with lossless synchronous delivery a
/// single table is equivalent to per-neighbor inboxes.
struct MailboxView {
  Eigen::MatrixXd stored;  // row j = x_j(t_k^j)
};

bool evaluate_trigger(const AgentCommState& state,
                      const Eigen::VectorXd& current_estimate, long t,
                      const ScheduleParams& params,
                      TriggerPolicy policy = TriggerPolicy::event);

void broadcast(AgentCommState& state, MailboxView& mailbox,
               const Eigen::VectorXd& current_estimate, long t);

/// ||X(t_k) - X(t)||_2 over the stacked N n-vector; `estimates` row i is x_i.
double transmit_error(const MailboxView& mailbox,
                      const Eigen::MatrixXd& estimates);

}  // namespace etd
