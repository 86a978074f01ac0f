#include "etd/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "etd/asymptotics.hpp"
#include "etd/error.hpp"
#include "etd/estimators.hpp"
#include "etd/rng.hpp"

namespace etd {

namespace {

// Neumaier-compensated running sum of equally shaped matrices.
class CompensatedSum {
 public:
  CompensatedSum(Eigen::Index rows, Eigen::Index cols)
      : sum_(Eigen::MatrixXd::Zero(rows, cols)),
        comp_(Eigen::MatrixXd::Zero(rows, cols)) {}

  void add(const Eigen::MatrixXd& x) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double s = sum_(k);
      const double t = s + x(k);
      comp_(k) += std::abs(s) >= std::abs(x(k)) ? (s - t) + x(k)
                                                : (x(k) - t) + s;
      sum_(k) = t;
    }
  }
  Eigen::MatrixXd total() const { return sum_ + comp_; }

 private:
  Eigen::MatrixXd sum_;
  Eigen::MatrixXd comp_;
};

}  // namespace

void parallel_for(int count, unsigned threads,
                  const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(count));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int r = next++; r < count; r = next++) {
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<long> log_checkpoints(long first, long last, int count) {
  if (first < 1 || last < first || count < 1)
    throw Error(ErrorCode::DomainError, "invalid checkpoint range");
  std::vector<long> out;
  const double lf = std::log(static_cast<double>(first));
  const double ll = std::log(static_cast<double>(last));
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 1.0 : static_cast<double>(k) / (count - 1);
    out.push_back(std::lround(std::exp(lf + frac * (ll - lf))));
  }
  out.front() = first;
  out.back() = last;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BiasStudy monte_carlo_bias(const SimConfig& config, int n_runs,
                           std::vector<long> checkpoints, unsigned threads) {
  if (n_runs < 1) throw Error(ErrorCode::DomainError, "n_runs must be >= 1");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  if (checkpoints.empty() || checkpoints.front() < 0)
    throw Error(ErrorCode::DomainError, "checkpoints must be non-negative");

  SimConfig cfg = config;
  cfg.mode = Mode::event_triggered;
  cfg.horizon = checkpoints.back();
  cfg.record_steps = checkpoints;

  const int n_agents = cfg.system.agents();
  const int n = cfg.system.param_dim();
  const auto k_count = static_cast<Eigen::Index>(checkpoints.size());
  // Row k, block i: x_i(t_k) - theta for one replication.
  std::vector<Eigen::MatrixXd> errors(static_cast<std::size_t>(n_runs));

  parallel_for(n_runs, threads, [&](int r) {
    const SimTrace trace = run_simulation(cfg, static_cast<std::uint64_t>(r));
    Eigen::MatrixXd e(k_count, n_agents * n);
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const StepRecord* rec = trace.find(checkpoints[static_cast<std::size_t>(k)]);
      for (int i = 0; i < n_agents; ++i)
        e.block(k, i * n, 1, n) =
            rec->estimates.row(i) - cfg.system.theta().transpose();
    }
    errors[static_cast<std::size_t>(r)] = std::move(e);
  });

  CompensatedSum sum(k_count, n_agents * n);
  for (const auto& e : errors) sum.add(e);
  const Eigen::MatrixXd mean = sum.total() / static_cast<double>(n_runs);

  BiasStudy out;
  out.checkpoints = std::move(checkpoints);
  out.n_runs = n_runs;
  out.low_confidence = n_runs < 2;
  out.mean_error_norm.resize(k_count, n_agents);
  for (Eigen::Index k = 0; k < k_count; ++k)
    for (int i = 0; i < n_agents; ++i)
      out.mean_error_norm(k, i) = mean.block(k, i * n, 1, n).norm();
  return out;
}

NormalityResult monte_carlo_normality(const ObservationSystem& sys, double a_c,
                                      const NormalityOptions& opt) {
  if (opt.n_runs < 2) throw Error(ErrorCode::DomainError, "need at least 2 runs");
  if (opt.t_eval < 0) throw Error(ErrorCode::DomainError, "t_eval must be >= 0");
  const AsymptoticCovariance cov = asymptotic_covariance(sys, a_c);

  const Eigen::VectorXd start = opt.initial.value_or(sys.theta());
  if (start.size() != sys.param_dim())
    throw Error(ErrorCode::DimensionMismatch, "initial estimate has wrong length");
  const int n = sys.param_dim();
  const double scale = std::sqrt(static_cast<double>(opt.t_eval) + 1.0);

  std::vector<Eigen::VectorXd> scaled(static_cast<std::size_t>(opt.n_runs));
  parallel_for(opt.n_runs, opt.threads, [&](int r) {
    auto noise = make_noise_stream(
        opt.noise_kind, substream_seed(opt.seed, static_cast<std::uint64_t>(r)),
        opt.noise_dof);
    CentralizedState cs{0, start, a_c, 1.0};
    for (long t = 0; t < opt.t_eval; ++t)
      centralized_step(cs, sample_measurements(sys, *noise), sys);
    scaled[static_cast<std::size_t>(r)] = scale * (cs.u - sys.theta());
  });

  CompensatedSum mean_sum(n, 1);
  for (const auto& v : scaled) mean_sum.add(v);
  const Eigen::VectorXd mean = mean_sum.total() / opt.n_runs;
  CompensatedSum cov_sum(n, n);
  for (const auto& v : scaled) {
    const Eigen::VectorXd d = v - mean;
    cov_sum.add(d * d.transpose());
  }

  NormalityResult out;
  out.sample_cov = cov_sum.total() / static_cast<double>(opt.n_runs - 1);
  out.s_c = cov.s_c;
  out.relative_error = relative_frobenius(out.sample_cov, out.s_c);
  out.n_runs = opt.n_runs;
  out.t_eval = opt.t_eval;
  return out;
}

}  // namespace etd
