#include <doctest.h>

#include <cmath>
#include <random>

#include "etd/schedule.hpp"

using namespace etd;

namespace {

ScheduleParams reference_schedule(double eps1 = 18.0) {
  ScheduleParams p;
  p.a = 1;
  p.b = 1;
  p.tau1 = 0.7;
  p.tau2 = 0.5;
  p.rho = {0.6, 0.6, 0.6, 0.6};
  p.epsilon1 = eps1;
  return p;
}

}  // namespace

TEST_SUITE("schedules") {

TEST_CASE("gain sequences") {
  ScheduleParams p = reference_schedule();
  CHECK(alpha(p, 0) == 1.0);
  // 10000^-0.7 = 10^-2.8
  CHECK(alpha(p, 9999) == doctest::Approx(std::exp(-2.8 * std::log(10.0))).epsilon(1e-14));
  CHECK(alpha(p, 9999) == doctest::Approx(1.584893192461114e-3).epsilon(1e-12));
  p.a = 2;
  p.tau1 = 1;
  CHECK(alpha(p, 1) == 1.0);

  ScheduleParams q = reference_schedule();
  CHECK(beta(q, 0) == 1.0);
  CHECK(beta(q, 99) == doctest::Approx(0.1).epsilon(1e-15));
  q.b = 3;
  CHECK(beta(q, 8) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("trigger thresholds") {
  const ScheduleParams p = reference_schedule();
  CHECK(threshold(p, 0, 0) == 1.0);
  // 100^-0.6 = 10^-1.2
  CHECK(threshold(p, 2, 99) == doctest::Approx(0.06309573444801933).epsilon(1e-13));
  double prev = threshold(p, 1, 0);
  for (long t = 1; t < 100000; t = t * 3 + 1) {
    const double cur = threshold(p, 1, t);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(threshold(p, 1, 1'000'000'000) < 1e-5);
}

TEST_CASE("gains are strictly decreasing") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ScheduleParams p = reference_schedule();
    p.a = 5 * u(rng);
    p.b = 5 * u(rng);
    p.tau1 = u(rng);
    p.tau2 = u(rng);
    for (long t = 0; t < 2000; ++t) {
      CHECK(alpha(p, t + 1) < alpha(p, t));
      CHECK(beta(p, t + 1) < beta(p, t));
    }
  }
}

TEST_CASE("reproduction configuration satisfies every condition") {
  const ConditionReport r = validate(reference_schedule(18.0));
  CHECK(r.assumption4_ok);
  CHECK(r.unbiased_ok);
  CHECK(r.bounded_ok);
  CHECK(r.sparse_trigger_ok);
  CHECK(r.consensus_tau0_sup == doctest::Approx(0.15));
  CHECK(r.approx_tau0_sup == doctest::Approx(0.15));
  for (double eps : {8.0, 10.0, 50.0, 1000.0}) {
    const ConditionReport q = validate(reference_schedule(eps));
    CHECK(q.assumption4_ok);
    CHECK(q.unbiased_ok);
    CHECK(q.bounded_ok);
    // eps1 = 8 puts rho0 exactly on tau1 - 1/(2+eps1) = 0.6.
    CHECK(q.sparse_trigger_ok == (eps > 8.0));
  }
}

TEST_CASE("small rho breaks unbiasedness") {
  ScheduleParams p = reference_schedule();
  p.rho.assign(4, 0.1);
  const ConditionReport r = validate(p);
  CHECK_FALSE(r.unbiased_ok);
  CHECK(r.bounded_ok);  // 0.1 > 0.5 - 0.5
}

TEST_CASE("equal decay exponents violate the step-size assumption") {
  ScheduleParams p = reference_schedule();
  p.tau1 = 1.0;
  p.tau2 = 1.0;
  for (double rho : {0.1, 0.5, 2.0}) {
    p.rho.assign(4, rho);
    CHECK_FALSE(validate(p).assumption4_ok);
  }
}

TEST_CASE("boundaries evaluate strictly") {
  ScheduleParams p = reference_schedule();
  p.tau1 = 0.75;
  p.tau2 = 0.5;
  p.rho.assign(4, 0.25);  // 0.75 - 0.5 is exact in binary
  CHECK_FALSE(validate(p).unbiased_ok);
  p.rho.assign(4, 0.7);  // tau1 - 1/(2+18) = 0.7
  CHECK_FALSE(validate(p).sparse_trigger_ok);
}

TEST_CASE("validate is pure") {
  const ScheduleParams p = reference_schedule();
  const ConditionReport a = validate(p);
  const ConditionReport b = validate(p);
  CHECK(a.messages == b.messages);
  CHECK(a.consensus_tau0_sup == b.consensus_tau0_sup);
  CHECK(a.sparse_trigger_ok == b.sparse_trigger_ok);
}

}  // TEST_SUITE
