#include "etd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "etd/error.hpp"

namespace etd {

namespace {

double log_log_slope(const std::vector<long>& steps,
                     const std::vector<double>& values, long from) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long count = 0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k] < from || !(values[k] > 0.0)) continue;
    const double x = std::log(static_cast<double>(steps[k]) + 1.0);
    const double y = std::log(values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return 0.0;
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (count * sxy - sx * sy) / denom;
}

void fill_tail(DecaySequence& seq, long horizon) {
  seq.tail_slope = log_log_slope(seq.steps, seq.values, horizon / 2);
  if (!seq.hypothesis_ok)
    seq.warning = "tau0 = " + std::to_string(seq.tau0) +
                  " is not below the certified supremum " +
                  std::to_string(seq.tau0_sup) +
                  "; decay is not guaranteed";
}

double mean_of(const std::vector<long>& v, std::size_t first, std::size_t count) {
  double s = 0.0;
  for (std::size_t k = first; k < first + count; ++k) s += static_cast<double>(v[k]);
  return s / static_cast<double>(count);
}

}  // namespace

double DecaySequence::at(long t) const {
  auto it = std::lower_bound(steps.begin(), steps.end(), t);
  if (it == steps.end() || *it != t)
    throw Error(ErrorCode::NotFound,
                label + ": step " + std::to_string(t) + " was not recorded");
  return values[static_cast<std::size_t>(it - steps.begin())];
}

DecaySequence consensus_decay(const SimTrace& trace, double tau0) {
  if (!trace.has_distributed)
    throw Error(ErrorCode::MissingBaseline, "trace has no distributed trajectory");
  DecaySequence seq;
  seq.label = "consensus";
  seq.tau0 = tau0;
  seq.tau0_sup = validate(trace.config.schedule).consensus_tau0_sup;
  seq.hypothesis_ok = tau0 >= 0.0 && tau0 < seq.tau0_sup;
  for (const auto& r : trace.records) {
    seq.steps.push_back(r.t);
    seq.values.push_back(std::pow(static_cast<double>(r.t) + 1.0, tau0) *
                         r.consensus_deviation.maxCoeff());
  }
  fill_tail(seq, trace.config.horizon);
  return seq;
}

DecaySequence centralized_gap(const SimTrace& trace, double tau0) {
  if (!trace.has_distributed || trace.records.empty() ||
      !trace.records.front().centralized)
    throw Error(ErrorCode::MissingBaseline,
                "trace has no parallel centralized trajectory");
  const SimConfig& c = trace.config;
  DecaySequence seq;
  seq.label = "centralized_gap";
  seq.tau0 = tau0;
  seq.tau0_sup = validate(c.schedule).approx_tau0_sup;
  seq.hypothesis_ok = tau0 >= 0.0 && tau0 < seq.tau0_sup;
  for (const auto& r : trace.records) {
    const Eigen::RowVectorXd u = r.centralized->transpose();
    const double gap = (r.estimates.rowwise() - u).rowwise().norm().maxCoeff();
    seq.steps.push_back(r.t);
    seq.values.push_back(std::pow(static_cast<double>(r.t) + 1.0, tau0) * gap);
  }
  fill_tail(seq, c.horizon);
  if (c.a_c != c.schedule.a || c.tau_c != c.schedule.tau1) {
    if (!seq.warning.empty()) seq.warning += "; ";
    seq.warning += "centralized baseline does not share (a, tau1)";
  }
  return seq;
}

CommunicationStats communication_stats(const SimTrace& trace) {
  CommunicationStats s;
  s.horizon = trace.config.horizon;
  const double slots = static_cast<double>(s.horizon);
  for (const auto& times : trace.trigger_times) {
    AgentIntervals a;
    for (long t : times) (t == 0 ? s.forced_broadcasts : a.broadcasts) += 1;
    a.rate = slots > 0 ? static_cast<double>(a.broadcasts) / slots : 0.0;
    for (std::size_t k = 1; k < times.size(); ++k)
      a.intervals.push_back(times[k] - times[k - 1]);
    const std::size_t count = a.intervals.size();
    if (count == 0) {
      a.first_decile_mean = a.last_decile_mean = a.growth_ratio =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      const std::size_t decile = std::max<std::size_t>(1, count / 10);
      a.first_decile_mean = mean_of(a.intervals, 0, decile);
      a.last_decile_mean = mean_of(a.intervals, count - decile, decile);
      a.growth_ratio = a.last_decile_mean / a.first_decile_mean;
    }
    s.broadcasts += a.broadcasts;
    s.agents.push_back(std::move(a));
  }
  const double denom = slots * static_cast<double>(trace.trigger_times.size());
  s.rate = denom > 0 ? static_cast<double>(s.broadcasts) / denom : 0.0;
  return s;
}

BroadcastBoundAudit audit_broadcast_bound(const SimTrace& trace) {
  BroadcastBoundAudit audit;
  if (!trace.has_triggers) return audit;
  const ScheduleParams& p = trace.config.schedule;
  for (const auto& rec : trace.records) {
    for (int i = 0; i < static_cast<int>(trace.trigger_times.size()); ++i) {
      const auto& times = trace.trigger_times[static_cast<std::size_t>(i)];
      auto it = std::upper_bound(times.begin(), times.end(), rec.t);
      if (it == times.begin()) {
        ++audit.unchecked;
        continue;
      }
      const StepRecord* src = trace.find(*std::prev(it));
      if (src == nullptr) {
        ++audit.unchecked;
        continue;
      }
      ++audit.checked;
      const double dev = (rec.estimates.row(i) - src->estimates.row(i)).norm();
      if (dev > threshold(p, i, rec.t)) ++audit.violations;
    }
  }
  return audit;
}

bool AgentIntervals::operator==(const AgentIntervals& o) const {
  auto same = [](double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
  };
  return broadcasts == o.broadcasts && rate == o.rate &&
         intervals == o.intervals &&
         same(first_decile_mean, o.first_decile_mean) &&
         same(last_decile_mean, o.last_decile_mean) &&
         same(growth_ratio, o.growth_ratio);
}

bool NormalityResult::operator==(const NormalityResult& o) const {
  auto same = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.array() == b.array()).all();
  };
  return same(sample_cov, o.sample_cov) && same(s_c, o.s_c) &&
         relative_error == o.relative_error && n_runs == o.n_runs &&
         t_eval == o.t_eval;
}

MetricsReport compute_metrics(const SimTrace& trace) {
  MetricsReport m;
  m.seed = trace.config.seed;
  m.horizon = trace.config.horizon;
  m.mode = std::string(to_string(trace.config.mode));
  if (trace.records.empty()) return m;
  const StepRecord& last = trace.records.back();
  const Eigen::VectorXd& theta = trace.config.system.theta();
  if (trace.has_distributed)
    m.final_error_norms.assign(last.error_norms.data(),
                               last.error_norms.data() + last.error_norms.size());
  if (last.centralized) m.final_centralized_error = (*last.centralized - theta).norm();
  if (trace.has_triggers) m.communication = communication_stats(trace);
  if (trace.has_distributed) {
    const DecaySequence c = consensus_decay(trace, 0.0);
    m.tau0_decay_checks.push_back({c.label, c.tau0, c.tail_slope, c.hypothesis_ok});
    if (last.centralized) {
      const DecaySequence g = centralized_gap(trace, 0.0);
      m.tau0_decay_checks.push_back({g.label, g.tau0, g.tail_slope, g.hypothesis_ok});
    }
  }
  return m;
}

double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double num = (a - b).norm();
  const double den = b.norm();
  if (den == 0.0)
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace etd
