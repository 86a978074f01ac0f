#include <doctest.h>

#include <cmath>

#include "etd/error.hpp"
#include "etd/metrics.hpp"
#include "etd/monte_carlo.hpp"
#include "test_fixtures.hpp"

using namespace etd;

TEST_SUITE("analysis_metrics") {

TEST_CASE("simulation is deterministic per seed") {
  SimConfig c = fixtures::reference_config();
  c.horizon = 3000;
  c.seed = 7;
  const SimTrace a = run_simulation(c);
  const SimTrace b = run_simulation(c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK((a.records[k].estimates.array() == b.records[k].estimates.array()).all());
    CHECK((a.records[k].centralized->array() == b.records[k].centralized->array()).all());
  }
  CHECK(a.trigger_times == b.trigger_times);
  c.seed = 8;
  CHECK_FALSE((run_simulation(c).records.back().estimates.array() ==
               a.records.back().estimates.array()).all());
}

TEST_CASE("zero horizon keeps only the initial state") {
  SimConfig c = fixtures::reference_config();
  c.horizon = 0;
  const SimTrace tr = run_simulation(c);
  REQUIRE(tr.records.size() == 1);
  CHECK(tr.records[0].t == 0);
  CHECK(tr.records[0].estimates == c.initial_estimates);
  const CommunicationStats s = communication_stats(tr);
  CHECK(s.rate == 0.0);
  CHECK(s.forced_broadcasts == 4);
}

TEST_CASE("consensus deviation vanishes for a synchronized noise-free start") {
  SimConfig c = fixtures::reference_config(0.0);
  c.initial_estimates = Eigen::MatrixXd::Ones(4, 1) * c.system.theta().transpose();
  c.centralized_initial = c.system.theta();
  c.horizon = 500;
  const SimTrace tr = run_simulation(c);
  const DecaySequence d = consensus_decay(tr, 0.1);
  for (double v : d.values) CHECK(v < 1e-12);
  const DecaySequence g = centralized_gap(tr, 0.1);
  for (double v : g.values) CHECK(v < 1e-12);
  const CommunicationStats s = communication_stats(tr);
  CHECK(s.broadcasts == 0);
}

TEST_CASE("decay hypotheses are flagged, not enforced") {
  SimConfig c = fixtures::reference_config();
  c.horizon = 200;
  const SimTrace tr = run_simulation(c);
  const DecaySequence ok = consensus_decay(tr, 0.1);
  CHECK(ok.hypothesis_ok);
  CHECK(ok.warning.empty());
  const DecaySequence bad = consensus_decay(tr, 0.3);
  CHECK_FALSE(bad.hypothesis_ok);
  CHECK_FALSE(bad.warning.empty());
  // Boundary tau0 = rho0 + tau2 - tau1 is excluded.
  const DecaySequence edge = centralized_gap(tr, 0.6 + 0.5 - 0.7);
  CHECK_FALSE(edge.hypothesis_ok);
}

TEST_CASE("centralized gap needs a baseline") {
  SimConfig c = fixtures::reference_config();
  c.horizon = 10;
  c.mode = Mode::event_triggered;
  try {
    centralized_gap(run_simulation(c), 0.0);
    FAIL("expected MissingBaseline");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingBaseline);
  }
}

TEST_CASE("single agent: distributed and centralized coincide") {
  Eigen::MatrixXd h(2, 2);
  h << 1, 0.5, 0, 1;
  const ObservationSystem sys(Eigen::Vector2d(1, 3), {h}, 0.04 * Eigen::MatrixXd::Identity(2, 2));
  SimConfig c = make_config(build_network(Eigen::MatrixXi::Zero(1, 1)), sys,
                            ScheduleParams{0.8, 1, 0.7, 0.5, {0.6}, 18},
                            Eigen::RowVector2d(-4, 4));
  c.mode = Mode::compare;
  c.horizon = 1000;
  const SimTrace tr = run_simulation(c);
  const DecaySequence g = centralized_gap(tr, 0.0);
  for (double v : g.values) CHECK(v == 0.0);
}

TEST_CASE("communication rate in the extreme policies") {
  SimConfig c = fixtures::reference_config();
  c.horizon = 400;
  c.mode = Mode::always_trigger;
  const CommunicationStats all = communication_stats(run_simulation(c));
  CHECK(all.rate == 1.0);
  CHECK(all.forced_broadcasts == 4);
  for (const auto& a : all.agents) CHECK(a.growth_ratio == 1.0);
}

TEST_CASE("communication statistics from hand-made trigger times") {
  SimTrace tr{fixtures::reference_config()};
  tr.config.horizon = 100;
  tr.has_triggers = true;
  tr.trigger_times = {{0, 3, 7}, {0}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 40, 80, 100}, {0, 50}};
  const CommunicationStats s = communication_stats(tr);
  CHECK(s.broadcasts == 2 + 0 + 14 + 1);
  CHECK(s.rate == doctest::Approx(17.0 / 400.0));
  CHECK(s.agents[0].intervals == std::vector<long>{3, 4});
  CHECK(s.agents[0].growth_ratio == doctest::Approx(4.0 / 3.0));
  CHECK(std::isnan(s.agents[1].growth_ratio));
  CHECK(s.agents[2].first_decile_mean == 1.0);
  CHECK(s.agents[2].last_decile_mean == 20.0);
}

TEST_CASE("broadcast bound audited from the trace") {
  SimConfig c = fixtures::reference_config();
  c.horizon = 5000;
  c.mode = Mode::event_triggered;
  const SimTrace tr = run_simulation(c);
  const BroadcastBoundAudit audit = audit_broadcast_bound(tr);
  CHECK(audit.checked == 4 * 5001);
  CHECK(audit.violations == 0);
  CHECK(audit.unchecked == 0);
  CHECK(tr.bound_violations == 0);
  CHECK(tr.max_transmit_error_ratio <= 1.0);
}

TEST_CASE("estimates stay bounded on the reproduction run") {
  SimConfig c = fixtures::reference_config();
  c.mode = Mode::event_triggered;
  const SimTrace tr = run_simulation(c);
  // Early overshoot (beta(0) * degree = 2) peaks near 1.5e3 around t = 8 in
  // pilot runs; cap at 10x that.
  CHECK(tr.max_state_norm >= std::sqrt(1700.0));
  CHECK(tr.max_state_norm < 1.5e4);
}

TEST_CASE("Monte Carlo bias degenerate cases") {
  SUBCASE("noise-free exact start") {
    SimConfig c = fixtures::reference_config(0.0);
    c.initial_estimates = Eigen::MatrixXd::Ones(4, 1) * c.system.theta().transpose();
    const BiasStudy b = monte_carlo_bias(c, 3, {10, 100, 500}, 2);
    CHECK(b.mean_error_norm.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("one run equals a single trajectory") {
    SimConfig c = fixtures::reference_config();
    c.mode = Mode::event_triggered;
    c.horizon = 300;
    const BiasStudy b = monte_carlo_bias(c, 1, {50, 300}, 1);
    CHECK(b.low_confidence);
    const SimTrace tr = run_simulation(c, 0);
    for (int i = 0; i < 4; ++i)
      CHECK(b.mean_error_norm(1, i) == doctest::Approx(tr.records.back().error_norms[i]).epsilon(1e-14));
  }
}

TEST_CASE("Monte Carlo results do not depend on thread count") {
  SimConfig c = fixtures::reference_config();
  const std::vector<long> cps = log_checkpoints(10, 800, 5);
  const BiasStudy one = monte_carlo_bias(c, 12, cps, 1);
  const BiasStudy many = monte_carlo_bias(c, 12, cps, 5);
  CHECK((one.mean_error_norm.array() == many.mean_error_norm.array()).all());

  NormalityOptions opt;
  opt.t_eval = 200;
  opt.n_runs = 40;
  opt.threads = 1;
  const NormalityResult n1 = monte_carlo_normality(c.system, 2.0, opt);
  opt.threads = 3;
  CHECK(monte_carlo_normality(c.system, 2.0, opt) == n1);
}

TEST_CASE("normality study edge cases") {
  NormalityOptions opt;
  opt.t_eval = 100;
  opt.n_runs = 10;
  const NormalityResult zero = monte_carlo_normality(fixtures::reference_system(0.0), 2.0, opt);
  CHECK(zero.sample_cov.isZero());
  CHECK(zero.s_c.isZero());
  CHECK(zero.relative_error == 0.0);
  CHECK_THROWS_AS(monte_carlo_normality(fixtures::reference_system(0.01), 1.0, opt), Error);
}

TEST_CASE("log checkpoints") {
  const auto cps = log_checkpoints(50, 5000, 9);
  CHECK(cps.front() == 50);
  CHECK(cps.back() == 5000);
  for (std::size_t k = 1; k < cps.size(); ++k) CHECK(cps[k] > cps[k - 1]);
  CHECK(cps[4] == 500);
}

}  // TEST_SUITE
