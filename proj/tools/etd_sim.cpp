// Command-line front end: run, validate, analyze, mc-bias, mc-normality, sweep.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "etd/asymptotics.hpp"
#include "etd/config_io.hpp"
#include "etd/error.hpp"
#include "etd/metrics.hpp"
#include "etd/monte_carlo.hpp"
#include "etd/schedule.hpp"
#include "etd/simulation.hpp"

namespace fs = std::filesystem;
using namespace etd;

namespace {

constexpr const char* kOutputEnv = "ETD_OUTPUT_DIR";

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kInternal = 3 };

void emit_error(std::string_view code, const std::string& message,
                std::optional<long> step = std::nullopt) {
  json err = {{"code", code}, {"message", message}};
  if (step) err["step"] = *step;
  std::cerr << json{{"error", err}}.dump() << '\n';
}

// Flag > environment > config file.
fs::path output_dir(const SimConfig& c, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return c.output.dir;
}

struct Manifest {
  std::vector<std::string> files;
  void add(const fs::path& p) { files.push_back(p.string()); }
};

void write_json(const fs::path& path, const json& doc, Manifest& m) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  f << doc.dump(2) << '\n';
  f.close();
  m.add(path);
}

// "lo:hi:step", inclusive of hi up to rounding.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  try {
    for (;;) {
      const auto colon = spec.find(':', start);
      parts.push_back(std::stod(spec.substr(start, colon - start)));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad grid '" + spec + "', expected lo:hi:step");
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0])
    throw Error(ErrorCode::ParseError, "bad grid '" + spec + "', expected lo:hi:step");
  std::vector<double> grid;
  const long count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long k = 0; k <= count; ++k)
    grid.push_back(std::round((parts[0] + k * parts[2]) * 1e12) / 1e12);
  return grid;
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long> horizon;
  unsigned threads = 0;
};

SimConfig load(const Common& o) {
  SimConfig c = load_config(o.config);
  if (o.seed) {
    c.seed = *o.seed;
    c.seed_defaulted = false;
  }
  if (o.horizon) c.horizon = *o.horizon;
  check_config(c);
  if (c.seed_defaulted)
    std::cerr << json{{"notice", "no seed in config, using 0"}}.dump() << '\n';
  return c;
}

int cmd_run(const Common& o, const std::optional<std::string>& mode,
            std::optional<long> stride) {
  const auto start = std::chrono::steady_clock::now();
  SimConfig c = load(o);
  if (mode) c.mode = parse_mode(*mode);
  if (stride) c.stride = *stride;
  check_config(c);

  const ConditionReport conditions = validate(c.schedule);
  const SimTrace trace = run_simulation(c);
  const MetricsReport metrics = compute_metrics(trace);

  const fs::path dir = output_dir(c, o.out);
  fs::create_directories(dir);
  Manifest m;
  {
    const fs::path p = dir / c.output.trace_csv;
    std::ofstream f(p);
    write_trace_csv(f, trace);
    f.close();
    m.add(p);
  }
  if (trace.has_triggers) {
    const fs::path p = dir / c.output.triggers_csv;
    std::ofstream f(p);
    write_triggers_csv(f, trace);
    f.close();
    m.add(p);
  }
  json metrics_doc = to_json(metrics);
  metrics_doc["config"] = config_to_json(c);
  write_json(dir / c.output.metrics_json, metrics_doc, m);
  for (const auto& p : write_plot_data(dir / c.output.plot_dir, trace)) m.add(p);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json summary = {{"conditions", to_json(conditions)},
                  {"metrics", to_json(metrics)},
                  {"manifest", m.files},
                  {"wall_seconds", wall}};
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

int cmd_validate(const Common& o, std::optional<double> epsilon1) {
  SimConfig c = load(o);
  if (epsilon1) c.schedule.epsilon1 = *epsilon1;
  std::cout << to_json(validate(c.schedule)).dump(2) << '\n';
  return kOk;
}

int cmd_analyze(const Common& o, std::optional<double> a_c, long t_max,
                bool allow_disconnected) {
  const SimConfig c = load(o);
  const double gain = a_c.value_or(c.a_c);
  json out;
  out["spectral_condition"] =
      to_json(spectral_condition(c.network, c.system, c.schedule, t_max, allow_disconnected));
  try {
    out["asymptotic_covariance"] = to_json(asymptotic_covariance(c.system, gain));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotHurwitz) throw;
    // Still report the ingredients so the user can pick a larger a_c.
    json partial = to_json(covariance_terms(c.system, gain));
    partial["note"] = e.what();
    out["asymptotic_covariance"] = partial;
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_mc_bias(const Common& o, int runs, std::vector<long> checkpoints,
                int count) {
  SimConfig c = load(o);
  if (checkpoints.empty()) checkpoints = log_checkpoints(1, c.horizon, count);
  const BiasStudy study = monte_carlo_bias(c, runs, checkpoints, o.threads);
  json doc = to_json(study);
  doc["seed"] = c.seed;
  doc["config"] = config_to_json(c);

  const fs::path dir = output_dir(c, o.out);
  fs::create_directories(dir);
  Manifest m;
  write_json(dir / "mc_bias.json", doc, m);
  std::cout << json{{"study", to_json(study)}, {"manifest", m.files}}.dump(2) << '\n';
  return kOk;
}

int cmd_mc_normality(const Common& o, double a_c, long t_eval, int runs,
                     const std::string& distribution, double dof,
                     bool start_at_mean) {
  const SimConfig c = load(o);
  NormalityOptions opt;
  opt.t_eval = t_eval;
  opt.n_runs = runs;
  opt.seed = c.seed;
  opt.threads = o.threads;
  opt.noise_dof = dof;
  if (distribution == "gaussian") opt.noise_kind = NoiseKind::gaussian;
  else if (distribution == "student_t") opt.noise_kind = NoiseKind::student_t;
  else throw Error(ErrorCode::ParseError, "unknown distribution '" + distribution + "'");
  if (start_at_mean) opt.initial = c.centralized_initial;

  const NormalityResult r = monte_carlo_normality(c.system, a_c, opt);
  json doc = to_json(r);
  doc["a_c"] = a_c;
  doc["seed"] = c.seed;
  doc["config"] = config_to_json(c);

  const fs::path dir = output_dir(c, o.out);
  fs::create_directories(dir);
  Manifest m;
  write_json(dir / "mc_normality.json", doc, m);
  std::cout << json{{"result", to_json(r)}, {"manifest", m.files}}.dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const Common& o, const std::string& grid_spec, int runs) {
  SimConfig base = load(o);
  base.mode = Mode::event_triggered;
  base.stride = base.horizon > 0 ? base.horizon : 1;  // only t = 0 and T are needed
  const std::vector<double> grid = parse_grid(grid_spec);
  if (runs < 1) throw Error(ErrorCode::DomainError, "--runs must be >= 1");

  struct Cell {
    double rate = 0.0;
    double final_error = 0.0;  // max_i ||x_i(T) - theta||
  };
  std::vector<Cell> cells(grid.size() * static_cast<std::size_t>(runs));
  parallel_for(static_cast<int>(cells.size()), o.threads, [&](int k) {
    SimConfig c = base;
    const double rho = grid[static_cast<std::size_t>(k / runs)];
    c.schedule.rho.assign(c.schedule.rho.size(), rho);
    const SimTrace tr = run_simulation(c, static_cast<std::uint64_t>(k % runs));
    cells[static_cast<std::size_t>(k)] = {communication_stats(tr).rate,
                                          tr.records.back().error_norms.maxCoeff()};
  });

  json rows = json::array();
  std::ostringstream csv;
  csv << provenance_line(base) << "\nrho,runs,mean_rate,mean_final_error\n";
  csv.precision(10);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double rate = 0.0, err = 0.0;
    for (int r = 0; r < runs; ++r) {
      rate += cells[g * runs + r].rate;
      err += cells[g * runs + r].final_error;
    }
    rate /= runs;
    err /= runs;
    rows.push_back({{"rho", grid[g]}, {"mean_rate", rate}, {"mean_final_error", err}});
    csv << grid[g] << ',' << runs << ',' << rate << ',' << err << '\n';
  }

  const fs::path dir = output_dir(base, o.out);
  fs::create_directories(dir);
  Manifest m;
  {
    const fs::path p = dir / "sweep.csv";
    std::ofstream f(p);
    f << csv.str();
    f.close();
    m.add(p);
  }
  write_json(dir / "sweep.json",
             {{"seed", base.seed}, {"runs", runs}, {"rows", rows}, {"config", config_to_json(base)}}, m);
  std::cout << json{{"rows", rows}, {"manifest", m.files}}.dump(2) << '\n';
  return kOk;
}

void add_common(CLI::App* sub, Common& o, bool with_out = true) {
  sub->add_option("-c,--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "override the config seed");
  sub->add_option("--horizon", o.horizon, "override the horizon T");
  if (with_out)
    sub->add_option("-o,--out", o.out,
                    std::string("output directory (overrides ") + kOutputEnv + " and the config)");
  sub->add_option("-j,--threads", o.threads, "worker threads, 0 = all cores");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered distributed estimation simulator"};
  app.require_subcommand(1);
  Common o;

  auto* run = app.add_subcommand("run", "simulate and write trace, triggers, metrics and plot data");
  add_common(run, o);
  std::optional<std::string> mode;
  std::optional<long> stride;
  run->add_option("--mode", mode, "event_triggered|time_driven|always_trigger|centralized|compare");
  run->add_option("--stride", stride, "record every k-th step");

  auto* val = app.add_subcommand("validate", "print the schedule condition report");
  add_common(val, o, false);
  std::optional<double> epsilon1;
  val->add_option("--epsilon1", epsilon1, "override the noise moment surplus");

  auto* ana = app.add_subcommand("analyze", "print the spectral condition and asymptotic covariance");
  add_common(ana, o, false);
  std::optional<double> analyze_ac;
  long t_max = 1'000'000;
  bool allow_disconnected = false;
  ana->add_option("--a-c", analyze_ac, "centralized gain (default: config)");
  ana->add_option("--t-max", t_max, "last step scanned");
  ana->add_flag("--allow-disconnected", allow_disconnected);

  auto* bias = app.add_subcommand("mc-bias", "Monte Carlo mean error at checkpoints");
  add_common(bias, o);
  int bias_runs = 200;
  int bias_count = 12;
  std::vector<long> checkpoints;
  bias->add_option("--runs", bias_runs, "replications")->check(CLI::PositiveNumber);
  bias->add_option("--checkpoints", checkpoints, "explicit checkpoint steps")->delimiter(',');
  bias->add_option("--count", bias_count, "log-spaced checkpoints when none given");

  auto* norm = app.add_subcommand("mc-normality", "Monte Carlo covariance of the centralized estimator");
  add_common(norm, o);
  double norm_ac = 2.0;
  long t_eval = 2000;
  int norm_runs = 1000;
  std::string distribution = "gaussian";
  double dof = 5.0;
  bool start_at_mean = false;
  norm->add_option("--a-c", norm_ac, "gain in alpha_c(t) = a_c/(t+1)");
  norm->add_option("--t-eval", t_eval, "evaluation step");
  norm->add_option("--runs", norm_runs, "replications")->check(CLI::PositiveNumber);
  norm->add_option("--distribution", distribution, "gaussian|student_t");
  norm->add_option("--dof", dof, "Student-t degrees of freedom");
  norm->add_flag("--start-at-mean", start_at_mean, "start from the config's centralized initial value instead of theta");

  auto* sweep = app.add_subcommand("sweep", "communication rate vs final error over a rho grid");
  add_common(sweep, o);
  std::string grid = "0.3:0.9:0.1";
  int sweep_runs = 1;
  sweep->add_option("--rho", grid, "lo:hi:step (inclusive) or a single value");
  sweep->add_option("--runs", sweep_runs, "replications per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("UsageError", e.what());
    return kUsage;
  }

  try {
    if (*run) return cmd_run(o, mode, stride);
    if (*val) return cmd_validate(o, epsilon1);
    if (*ana) return cmd_analyze(o, analyze_ac, t_max, allow_disconnected);
    if (*bias) return cmd_mc_bias(o, bias_runs, checkpoints, bias_count);
    if (*norm) return cmd_mc_normality(o, norm_ac, t_eval, norm_runs, distribution, dof, start_at_mean);
    if (*sweep) return cmd_sweep(o, grid, sweep_runs);
  } catch (const Error& e) {
    emit_error(to_string(e.code()), e.what(), e.step());
    return kFailure;
  } catch (const json::exception& e) {
    emit_error("ParseError", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    emit_error("Internal", e.what());
    return kInternal;
  }
  return kUsage;
}
