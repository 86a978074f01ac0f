#pragma once

#include <string>
#include <vector>

namespace etd {

/// Gain and trigger-threshold exponents.
///
///   alpha(t)       = a / (t+1)^tau1      innovation gain
///   beta(t)        = b / (t+1)^tau2      consensus gain
///   threshold_i(t) = 1 / (t+1)^rho_i     broadcast threshold of agent i
///
/// epsilon1 is the noise moment surplus: E||V||^{2+epsilon1} < inf.
struct ScheduleParams {
  double a = 1.0;
  double b = 1.0;
  double tau1 = 0.7;
  double tau2 = 0.5;
  std::vector<double> rho;
  double epsilon1 = 18.0;

  double rho0() const;
  int agents() const { return static_cast<int>(rho.size()); }
};

/// Throws DomainError unless a, b, epsilon1 > 0, rho is non-empty with finite
/// non-negative entries, and the exponents are finite.
void check_params(const ScheduleParams& params);

double alpha(const ScheduleParams& params, long t);
double beta(const ScheduleParams& params, long t);
double threshold(const ScheduleParams& params, int agent, long t);

struct ConditionReport {
  bool assumption4_ok = false;
  bool unbiased_ok = false;
  bool bounded_ok = false;
  double consensus_tau0_sup = 0.0;
  double approx_tau0_sup = 0.0;
  bool sparse_trigger_ok = false;
  std::vector<std::string> messages;
};

/// Evaluates every exponent relation with strict semantics; never throws.
ConditionReport validate(const ScheduleParams& params);

}  // namespace etd
