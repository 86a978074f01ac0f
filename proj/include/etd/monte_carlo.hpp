#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "etd/metrics.hpp"
#include "etd/simulation.hpp"

namespace etd {

/// Runs body(r) for r in [0, count) on up to `threads` workers
/// (0 = hardware concurrency). Exceptions are rethrown on the caller.
void parallel_for(int count, unsigned threads,
                  const std::function<void(int)>& body);

/// Logarithmically spaced, deduplicated integer steps in [first, last].
std::vector<long> log_checkpoints(long first, long last, int count);

struct BiasStudy {
  std::vector<long> checkpoints;
  Eigen::MatrixXd mean_error_norm;  // checkpoints x N: ||mean_r x_i(t) - theta||
  int n_runs = 0;
  bool low_confidence = false;      // n_runs < 2
};

/// Event-triggered runs on substreams 0..n_runs-1 of config.seed.
/// The result does not depend on `threads`.
BiasStudy monte_carlo_bias(const SimConfig& config, int n_runs,
                           std::vector<long> checkpoints, unsigned threads = 0);

struct NormalityOptions {
  long t_eval = 2000;
  int n_runs = 1000;
  std::uint64_t seed = 0;
  NoiseKind noise_kind = NoiseKind::gaussian;
  double noise_dof = 5.0;
  std::optional<Eigen::VectorXd> initial;  // defaults to theta
  unsigned threads = 0;
};

/// Centralized runs with alpha_c(t) = a_c/(t+1); compares the sample
/// covariance of sqrt(t_eval+1)(u(t_eval) - theta) with S_c.
/// Throws NotHurwitz when a_c <= N / (2 lambda_min(G)).
NormalityResult monte_carlo_normality(const ObservationSystem& sys, double a_c,
                                      const NormalityOptions& options);

}  // namespace etd
