#include "etd/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "etd/error.hpp"
#include "etd/rng.hpp"

namespace etd {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::event_triggered: return "event_triggered";
    case Mode::time_driven: return "time_driven";
    case Mode::always_trigger: return "always_trigger";
    case Mode::centralized: return "centralized";
    case Mode::compare: return "compare";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::event_triggered, Mode::time_driven,
                 Mode::always_trigger, Mode::centralized, Mode::compare})
    if (text == to_string(m)) return m;
  throw Error(ErrorCode::ParseError, "unknown mode '" + std::string(text) + "'");
}

SimConfig make_config(Network network, ObservationSystem system,
                      ScheduleParams schedule, Eigen::MatrixXd initial) {
  SimConfig c{std::move(network), std::move(system), std::move(schedule),
              std::move(initial)};
  c.a_c = c.schedule.a;
  c.tau_c = c.schedule.tau1;
  if (c.initial_estimates.rows() > 0)
    c.centralized_initial = c.initial_estimates.colwise().mean().transpose();
  check_config(c);
  return c;
}

void check_config(const SimConfig& c) {
  const int n_agents = c.network.size();
  auto mismatch = [](const std::string& what) {
    throw Error(ErrorCode::DimensionMismatch, what);
  };
  if (c.system.agents() != n_agents)
    mismatch("network has " + std::to_string(n_agents) + " agents but " +
             std::to_string(c.system.agents()) + " sensors were given");
  if (c.schedule.agents() != n_agents)
    mismatch("rho must have one entry per agent");
  if (c.initial_estimates.rows() != n_agents ||
      c.initial_estimates.cols() != c.system.param_dim())
    mismatch("initial estimates must be N x n");
  if (c.centralized_initial.size() != c.system.param_dim())
    mismatch("centralized initial estimate must have length n");
  check_params(c.schedule);
  if (c.horizon < 0) throw Error(ErrorCode::DomainError, "horizon must be >= 0");
  if (c.stride < 1) throw Error(ErrorCode::DomainError, "stride must be >= 1");
  if (!(c.a_c > 0.0) || c.tau_c < 0.0)
    throw Error(ErrorCode::DomainError, "centralized gain needs a_c > 0, tau_c >= 0");
  if (!c.initial_estimates.allFinite())
    throw Error(ErrorCode::DomainError, "initial estimates must be finite");
}

const StepRecord* SimTrace::find(long t) const {
  auto it = std::lower_bound(
      records.begin(), records.end(), t,
      [](const StepRecord& r, long step) { return r.t < step; });
  if (it == records.end() || it->t != t) return nullptr;
  return &*it;
}

namespace {

bool should_record(const SimConfig& c, long t) {
  if (t == 0 || t == c.horizon) return true;
  if (!c.record_steps.empty())
    return std::binary_search(c.record_steps.begin(), c.record_steps.end(), t);
  return t % c.stride == 0;
}

StepRecord make_record(long t, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& theta) {
  StepRecord r;
  r.t = t;
  r.estimates = x;
  const Eigen::RowVectorXd avg = x.colwise().mean();
  r.error_norms.resize(x.rows());
  r.consensus_deviation.resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    r.error_norms[i] = (x.row(i) - theta.transpose()).norm();
    r.consensus_deviation[i] = (x.row(i) - avg).norm();
  }
  return r;
}

}  // namespace

SimTrace run_simulation(const SimConfig& config, std::uint64_t replication) {
  check_config(config);
  SimConfig sorted = config;
  std::sort(sorted.record_steps.begin(), sorted.record_steps.end());

  const Mode mode = config.mode;
  const bool run_et = mode == Mode::event_triggered ||
                      mode == Mode::always_trigger || mode == Mode::compare;
  const bool run_td = mode == Mode::time_driven || mode == Mode::compare;
  const bool run_c = mode == Mode::centralized || mode == Mode::compare;
  const TriggerPolicy policy = mode == Mode::always_trigger
                                   ? TriggerPolicy::always
                                   : TriggerPolicy::event;

  const ObservationSystem& sys = config.system;
  const ScheduleParams& params = config.schedule;
  const int n_agents = sys.agents();

  SimTrace trace{sorted};
  trace.has_distributed = run_et || run_td;
  trace.has_triggers = run_et;
  trace.stream_seed = substream_seed(config.seed, replication);
  trace.noise_stream_id =
      std::string("mt19937_64/") +
      (config.noise_kind == NoiseKind::gaussian ? "gaussian" : "student_t") +
      "/seed=" + std::to_string(config.seed) +
      "/replication=" + std::to_string(replication);
  auto noise = make_noise_stream(config.noise_kind, trace.stream_seed,
                                 config.noise_dof);

  DistributedState et;
  if (run_et) et = make_distributed_state(config.initial_estimates);
  TimeDrivenState td{0, config.initial_estimates};
  CentralizedState cs{0, config.centralized_initial, config.a_c, config.tau_c};

  const double rho0 = params.rho0();
  const double sqrt_n = std::sqrt(static_cast<double>(n_agents));

  for (long t = 0; t <= config.horizon; ++t) {
    std::vector<std::uint8_t> fired;
    if (run_et) {
      if (t == 0)
        fired.assign(static_cast<std::size_t>(n_agents), 1);
      else
        fired = trigger_phase(et, params, policy);

      if (policy == TriggerPolicy::event) {
        for (int i = 0; i < n_agents; ++i) {
          const double dev =
              (et.estimates.row(i) - et.mailbox.stored.row(i)).norm();
          if (dev > threshold(params, i, t)) ++trace.bound_violations;
        }
        const double ratio = transmit_error(et.mailbox, et.estimates) *
                             std::pow(static_cast<double>(t) + 1.0, rho0) /
                             sqrt_n;
        trace.max_transmit_error_ratio =
            std::max(trace.max_transmit_error_ratio, ratio);
      }
    }

    const Eigen::MatrixXd& primary = run_et ? et.estimates : td.estimates;
    if (trace.has_distributed)
      trace.max_state_norm = std::max(trace.max_state_norm, primary.norm());

    if (should_record(trace.config, t)) {
      StepRecord rec;
      if (trace.has_distributed) {
        rec = make_record(t, primary, sys.theta());
      } else {
        rec.t = t;
      }
      rec.triggered = std::move(fired);
      if (run_td && run_et) rec.time_driven = td.estimates;
      if (run_c) rec.centralized = cs.u;
      trace.records.push_back(std::move(rec));
    }

    if (t == config.horizon) break;

    const Eigen::VectorXd y = sample_measurements(sys, *noise);
    if (run_et) distributed_step(et, y, params, config.network, sys);
    if (run_td) time_driven_step(td, y, params, config.network, sys);
    if (run_c) centralized_step(cs, y, sys);
  }

  if (run_et) {
    trace.trigger_times.reserve(static_cast<std::size_t>(n_agents));
    for (auto& c : et.comm) trace.trigger_times.push_back(std::move(c.trigger_times));
  }
  return trace;
}

}  // namespace etd
