#include "etd/event_engine.hpp"

#include "etd/error.hpp"

namespace etd {

bool evaluate_trigger(const AgentCommState& state,
                      const Eigen::VectorXd& current_estimate, long t,
                      const ScheduleParams& params, TriggerPolicy policy) {
  if (t < state.last_trigger_time)
    throw Error(ErrorCode::DomainError,
                "trigger evaluated before the last triggering instant");
  switch (policy) {
    case TriggerPolicy::always: return true;
    case TriggerPolicy::never: return false;
    case TriggerPolicy::event: break;
  }
  const double deviation = (current_estimate - state.last_broadcast).norm();
  return deviation > threshold(params, state.agent, t);
}

void broadcast(AgentCommState& state, MailboxView& mailbox,
               const Eigen::VectorXd& current_estimate, long t) {
  if (!state.trigger_times.empty() && t <= state.trigger_times.back())
    throw Error(ErrorCode::DomainError,
                "broadcast times must be strictly increasing");
  state.last_broadcast = current_estimate;
  state.last_trigger_time = t;
  ++state.trigger_count;
  state.trigger_times.push_back(t);
  mailbox.stored.row(state.agent) = current_estimate.transpose();
}

double transmit_error(const MailboxView& mailbox,
                      const Eigen::MatrixXd& estimates) {
  if (mailbox.stored.rows() != estimates.rows() ||
      mailbox.stored.cols() != estimates.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "mailbox and estimates differ in shape");
  return (mailbox.stored - estimates).norm();
}

}  // namespace etd
