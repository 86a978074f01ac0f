#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "etd/simulation.hpp"

namespace etd {

/// (t+1)^tau0 * deviation(t) at every recorded step, with a log-log slope
/// fitted over the second half of the horizon.
struct DecaySequence {
  std::string label;
  double tau0 = 0.0;
  double tau0_sup = 0.0;
  bool hypothesis_ok = true;  // tau0 < tau0_sup
  std::vector<long> steps;
  std::vector<double> values;
  double tail_slope = 0.0;
  std::string warning;

  /// Value at step t; throws NotFound if t was not recorded.
  double at(long t) const;
};

/// max_i ||x_i(t) - x_avg(t)||, scaled.
DecaySequence consensus_decay(const SimTrace& trace, double tau0);

/// max_i ||x_i(t) - u(t)||, scaled. Throws MissingBaseline when the trace has
/// no parallel centralized trajectory.
DecaySequence centralized_gap(const SimTrace& trace, double tau0);

struct AgentIntervals {
  long broadcasts = 0;  // excluding the forced t = 0 broadcast
  double rate = 0.0;
  std::vector<long> intervals;  // t_{k+1} - t_k, starting from t_0 = 0
  double first_decile_mean = 0.0;
  double last_decile_mean = 0.0;
  double growth_ratio = 0.0;  // NaN when the agent never re-broadcast

  // NaN-aware, so a report survives a JSON round trip unchanged.
  bool operator==(const AgentIntervals& o) const;
};

struct CommunicationStats {
  double rate = 0.0;  // broadcasts / (N T), forced t = 0 broadcasts excluded
  long broadcasts = 0;
  long forced_broadcasts = 0;
  long horizon = 0;
  std::vector<AgentIntervals> agents;

  bool operator==(const CommunicationStats&) const = default;
};

CommunicationStats communication_stats(const SimTrace& trace);

struct BroadcastBoundAudit {
  long checked = 0;
  long violations = 0;
  long unchecked = 0;  // stored copy originates from an unrecorded step
};

/// Re-derives every stored copy from recorded estimates and trigger times
/// and checks ||x_i(t) - x_i(t_k^i)|| <= (t+1)^-rho_i at each recorded step.
BroadcastBoundAudit audit_broadcast_bound(const SimTrace& trace);

struct DecayCheck {
  std::string label;
  double tau0 = 0.0;
  double tail_slope = 0.0;
  bool hypothesis_ok = true;

  bool operator==(const DecayCheck&) const = default;
};

struct NormalityResult {
  Eigen::MatrixXd sample_cov;
  Eigen::MatrixXd s_c;
  double relative_error = 0.0;
  int n_runs = 0;
  long t_eval = 0;

  bool operator==(const NormalityResult& o) const;
};

struct MetricsReport {
  std::uint64_t seed = 0;
  long horizon = 0;
  std::string mode;
  std::vector<double> final_error_norms;
  std::optional<double> final_centralized_error;
  std::optional<CommunicationStats> communication;
  std::vector<DecayCheck> tau0_decay_checks;
  std::optional<NormalityResult> normality;

  bool operator==(const MetricsReport&) const = default;
};

/// Summary used by the CLI: final errors, communication statistics and
/// tau0 = 0 decay checks for whatever trajectories the trace carries.
MetricsReport compute_metrics(const SimTrace& trace);

/// Relative Frobenius error ||a - b|| / ||b||; 0 when both vanish.
double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace etd
