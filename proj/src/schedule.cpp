#include "etd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "etd/error.hpp"

namespace etd {

double ScheduleParams::rho0() const {
  if (rho.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(rho.begin(), rho.end());
}

void check_params(const ScheduleParams& p) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::DomainError, "schedule: " + what);
  };
  if (!(p.a > 0.0) || !std::isfinite(p.a)) fail("a must be positive");
  if (!(p.b > 0.0) || !std::isfinite(p.b)) fail("b must be positive");
  if (!(p.epsilon1 > 0.0)) fail("epsilon1 must be positive");
  if (!std::isfinite(p.tau1) || !std::isfinite(p.tau2))
    fail("decay exponents must be finite");
  if (p.rho.empty()) fail("rho must list one exponent per agent");
  for (double r : p.rho)
    if (!std::isfinite(r) || r < 0.0) fail("rho entries must be >= 0");
}

double alpha(const ScheduleParams& p, long t) {
  return p.a / std::pow(static_cast<double>(t) + 1.0, p.tau1);
}

double beta(const ScheduleParams& p, long t) {
  return p.b / std::pow(static_cast<double>(t) + 1.0, p.tau2);
}

double threshold(const ScheduleParams& p, int agent, long t) {
  return 1.0 / std::pow(static_cast<double>(t) + 1.0,
                        p.rho.at(static_cast<std::size_t>(agent)));
}

ConditionReport validate(const ScheduleParams& p) {
  ConditionReport r;
  const double moment = 1.0 / (2.0 + p.epsilon1);
  const double rho0 = p.rho0();
  const double t1 = p.tau1;
  const double t2 = p.tau2;

  auto note = [&r](bool ok, const std::string& text) {
    r.messages.push_back((ok ? "ok: " : "violated: ") + text);
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };

  const bool order_ok = 0.0 < t2 && t2 <= t1 && t1 <= 1.0;
  const bool t1_ok = t1 > std::max(t2 + moment, 0.5);
  r.assumption4_ok = p.a > 0.0 && p.b > 0.0 && order_ok && t1_ok;
  note(order_ok, "0 < tau2 <= tau1 <= 1 (tau1=" + fmt(t1) +
                     ", tau2=" + fmt(t2) + ")");
  note(t1_ok, "tau1 > max(tau2 + 1/(2+eps1), 0.5) (" + fmt(t1) + " vs " +
                  fmt(std::max(t2 + moment, 0.5)) + ")");

  r.unbiased_ok = rho0 > t1 - t2;
  note(r.unbiased_ok, "rho0 > tau1 - tau2 (" + fmt(rho0) + " vs " +
                          fmt(t1 - t2) + "): asymptotic unbiasedness");
  r.bounded_ok = rho0 > 0.5 - t2;
  note(r.bounded_ok, "rho0 > 0.5 - tau2 (" + fmt(rho0) + " vs " +
                         fmt(0.5 - t2) + "): bounded estimates");
  r.sparse_trigger_ok = rho0 < t1 - moment;
  note(r.sparse_trigger_ok, "rho0 < tau1 - 1/(2+eps1) (" + fmt(rho0) +
                                " vs " + fmt(t1 - moment) +
                                "): triggering intervals grow without bound");

  r.consensus_tau0_sup = std::min(rho0, t1 - t2 - moment);
  r.approx_tau0_sup = std::min(t1 - t2 - moment, rho0 + t2 - t1);
  if (!(r.consensus_tau0_sup > 0.0))
    r.messages.push_back(
        "advisory: no positive consensus decay rate is certified");
  if (!(r.approx_tau0_sup > 0.0))
    r.messages.push_back(
        "advisory: no positive centralized-approximation rate is certified");
  return r;
}

}  // namespace etd
