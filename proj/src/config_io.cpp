#include "etd/config_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "etd/error.hpp"

namespace etd {

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, "config: " + what);
}

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    parse_fail(std::string("missing field '") + key + "'");
  return obj.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) parse_fail(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v[static_cast<Eigen::Index>(k)] = number(j[k], what);
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

// NaN/inf have no JSON representation; encode as null.
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "student_t") return NoiseKind::student_t;
  parse_fail("unknown noise distribution '" + s + "'");
}

void write_row(std::ostream& out, const Eigen::RowVectorXd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) out << ',' << v[k];
}

}  // namespace

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) parse_fail(std::string(what) + " must be an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  // A flat array is a single row.
  if (!j.front().is_array()) return vector_from_json(j, what).transpose();
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw Error(ErrorCode::DimensionMismatch,
                  std::string("config: ") + what + " rows differ in length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number(j[r][c], what);
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

SimConfig parse_config(const json& doc) {
  if (!doc.is_object()) parse_fail("top level must be an object");

  const Eigen::MatrixXd adj_real =
      matrix_from_json(require(require(doc, "network"), "adjacency"), "adjacency");
  Eigen::MatrixXi adj = adj_real.cast<int>();
  if (!(adj.cast<double>().array() == adj_real.array()).all())
    parse_fail("adjacency entries must be integers");
  Network net = build_network(adj);

  const Eigen::VectorXd theta = vector_from_json(require(doc, "theta"), "theta");
  const json& sensors_j = require(doc, "sensors");
  if (!sensors_j.is_array()) parse_fail("sensors must be an array of matrices");
  std::vector<Eigen::MatrixXd> sensors;
  for (const auto& s : sensors_j) sensors.push_back(matrix_from_json(s, "sensor"));
  for (std::size_t i = 0; i < sensors.size(); ++i)
    if (sensors[i].cols() != theta.size())
      throw Error(ErrorCode::DimensionMismatch,
                  "config: sensor " + std::to_string(i) + " has " +
                      std::to_string(sensors[i].cols()) +
                      " columns but theta has length " +
                      std::to_string(theta.size()));
  int total_rows = 0;
  for (const auto& s : sensors) total_rows += static_cast<int>(s.rows());

  const json& noise = require(doc, "noise");
  Eigen::MatrixXd cov;
  std::optional<double> variance;
  if (noise.contains("covariance")) {
    cov = matrix_from_json(noise.at("covariance"), "noise covariance");
  } else if (noise.contains("variance")) {
    variance = number(noise.at("variance"), "noise variance");
    if (*variance < 0.0) parse_fail("noise variance must be >= 0");
    cov = *variance * Eigen::MatrixXd::Identity(total_rows, total_rows);
  } else {
    parse_fail("noise needs 'variance' or 'covariance'");
  }
  ObservationSystem sys(theta, std::move(sensors), std::move(cov));

  const json& sj = require(doc, "schedule");
  ScheduleParams sched;
  sched.a = number(require(sj, "a"), "a");
  sched.b = number(require(sj, "b"), "b");
  sched.tau1 = number(require(sj, "tau1"), "tau1");
  sched.tau2 = number(require(sj, "tau2"), "tau2");
  const json& rho = require(sj, "rho");
  if (rho.is_number())
    sched.rho.assign(static_cast<std::size_t>(net.size()), rho.get<double>());
  else {
    const Eigen::VectorXd r = vector_from_json(rho, "rho");
    sched.rho.assign(r.data(), r.data() + r.size());
  }
  if (sj.contains("epsilon1")) sched.epsilon1 = number(sj.at("epsilon1"), "epsilon1");

  Eigen::MatrixXd initial =
      matrix_from_json(require(doc, "initial_estimates"), "initial_estimates");
  if (initial.rows() != net.size() || initial.cols() != theta.size())
    throw Error(ErrorCode::DimensionMismatch,
                "config: initial_estimates must be N x n");

  SimConfig c = make_config(std::move(net), std::move(sys), std::move(sched),
                            std::move(initial));
  c.noise_variance = variance;
  if (noise.contains("distribution"))
    c.noise_kind = parse_noise_kind(noise.at("distribution").get<std::string>());
  if (noise.contains("dof")) c.noise_dof = number(noise.at("dof"), "dof");

  if (doc.contains("horizon")) c.horizon = doc.at("horizon").get<long>();
  if (doc.contains("seed")) {
    c.seed = doc.at("seed").get<std::uint64_t>();
  } else {
    c.seed = 0;
    c.seed_defaulted = true;
  }
  if (doc.contains("mode")) c.mode = parse_mode(doc.at("mode").get<std::string>());
  if (doc.contains("stride")) c.stride = doc.at("stride").get<long>();
  if (doc.contains("record_steps"))
    c.record_steps = doc.at("record_steps").get<std::vector<long>>();
  if (doc.contains("connectivity_tol"))
    c.connectivity_tol = number(doc.at("connectivity_tol"), "connectivity_tol");

  if (doc.contains("centralized")) {
    const json& cj = doc.at("centralized");
    if (cj.contains("a_c")) c.a_c = number(cj.at("a_c"), "a_c");
    if (cj.contains("tau_c")) c.tau_c = number(cj.at("tau_c"), "tau_c");
    if (cj.contains("initial"))
      c.centralized_initial = vector_from_json(cj.at("initial"), "centralized initial");
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    c.output.dir = o.value("dir", c.output.dir);
    c.output.trace_csv = o.value("trace_csv", c.output.trace_csv);
    c.output.triggers_csv = o.value("triggers_csv", c.output.triggers_csv);
    c.output.metrics_json = o.value("metrics_json", c.output.metrics_json);
    c.output.plot_dir = o.value("plot_dir", c.output.plot_dir);
  }
  check_config(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

json config_to_json(const SimConfig& c) {
  json doc;
  doc["network"]["adjacency"] = matrix_to_json(c.network.adjacency().cast<double>());
  // Integer adjacency reads better.
  for (auto& row : doc["network"]["adjacency"])
    for (auto& v : row) v = static_cast<int>(v.get<double>());
  doc["theta"] = vector_to_json(c.system.theta());
  doc["sensors"] = json::array();
  for (const auto& h : c.system.sensors()) doc["sensors"].push_back(matrix_to_json(h));
  if (c.noise_variance)
    doc["noise"]["variance"] = *c.noise_variance;
  else
    doc["noise"]["covariance"] = matrix_to_json(c.system.noise_cov());
  doc["noise"]["distribution"] =
      c.noise_kind == NoiseKind::gaussian ? "gaussian" : "student_t";
  doc["noise"]["dof"] = c.noise_dof;
  doc["schedule"] = {{"a", c.schedule.a},       {"b", c.schedule.b},
                     {"tau1", c.schedule.tau1}, {"tau2", c.schedule.tau2},
                     {"rho", c.schedule.rho},   {"epsilon1", c.schedule.epsilon1}};
  doc["initial_estimates"] = matrix_to_json(c.initial_estimates);
  doc["centralized"] = {{"a_c", c.a_c},
                        {"tau_c", c.tau_c},
                        {"initial", vector_to_json(c.centralized_initial)}};
  doc["horizon"] = c.horizon;
  doc["seed"] = c.seed;
  doc["mode"] = std::string(to_string(c.mode));
  doc["stride"] = c.stride;
  if (!c.record_steps.empty()) doc["record_steps"] = c.record_steps;
  doc["connectivity_tol"] = c.connectivity_tol;
  doc["output"] = {{"dir", c.output.dir},
                   {"trace_csv", c.output.trace_csv},
                   {"triggers_csv", c.output.triggers_csv},
                   {"metrics_json", c.output.metrics_json},
                   {"plot_dir", c.output.plot_dir}};
  return doc;
}

json to_json(const ConditionReport& r) {
  return {{"assumption4_ok", r.assumption4_ok},
          {"unbiased_ok", r.unbiased_ok},
          {"bounded_ok", r.bounded_ok},
          {"sparse_trigger_ok", r.sparse_trigger_ok},
          {"consensus_tau0_sup", r.consensus_tau0_sup},
          {"approx_tau0_sup", r.approx_tau0_sup},
          {"messages", r.messages}};
}

json to_json(const SpectralCondition& s) {
  return {{"base_min_eigenvalue", s.base_min_eigenvalue},
          {"base_positive_definite", s.base_positive_definite},
          {"t_star", s.t_star},
          {"max_eig_at_t_star", s.max_eig_at_t_star},
          {"m0", real(s.m0)},
          {"holds_through_t_max", s.holds_through_t_max},
          {"scanned_steps", s.scanned_steps},
          {"t_max", s.t_max}};
}

json to_json(const AsymptoticCovariance& a) {
  json out = {{"a_c", a.a_c},
              {"sigma1", matrix_to_json(a.sigma1)},
              {"s1", matrix_to_json(a.s1)},
              {"sigma1_eigenvalues", vector_to_json(a.sigma1_eigenvalues)},
              {"hurwitz", a.hurwitz}};
  if (a.hurwitz && a.s_c.size() > 0) {
    out["s_c"] = matrix_to_json(a.s_c);
    out["residual"] = a.residual;
  }
  return out;
}

json to_json(const BiasStudy& b) {
  return {{"checkpoints", b.checkpoints},
          {"mean_error_norm", matrix_to_json(b.mean_error_norm)},
          {"n_runs", b.n_runs},
          {"low_confidence", b.low_confidence}};
}

json to_json(const NormalityResult& n) {
  return {{"sample_cov", matrix_to_json(n.sample_cov)},
          {"s_c", matrix_to_json(n.s_c)},
          {"relative_error", real(n.relative_error)},
          {"n_runs", n.n_runs},
          {"t_eval", n.t_eval}};
}

json to_json(const MetricsReport& m) {
  json out;
  out["seed"] = m.seed;
  out["horizon"] = m.horizon;
  out["mode"] = m.mode;
  out["final_error_norms"] = m.final_error_norms;
  out["final_centralized_error"] =
      m.final_centralized_error ? json(*m.final_centralized_error) : json(nullptr);
  if (m.communication) {
    const auto& c = *m.communication;
    json agents = json::array();
    for (const auto& a : c.agents)
      agents.push_back({{"broadcasts", a.broadcasts},
                        {"rate", a.rate},
                        {"intervals", a.intervals},
                        {"first_decile_mean", real(a.first_decile_mean)},
                        {"last_decile_mean", real(a.last_decile_mean)},
                        {"growth_ratio", real(a.growth_ratio)}});
    out["communication"] = {{"rate", c.rate},
                            {"broadcasts", c.broadcasts},
                            {"forced_broadcasts", c.forced_broadcasts},
                            {"horizon", c.horizon},
                            {"agents", agents}};
  } else {
    out["communication"] = nullptr;
  }
  out["tau0_decay_checks"] = json::array();
  for (const auto& d : m.tau0_decay_checks)
    out["tau0_decay_checks"].push_back({{"label", d.label},
                                        {"tau0", d.tau0},
                                        {"tail_slope", d.tail_slope},
                                        {"hypothesis_ok", d.hypothesis_ok}});
  out["normality"] = m.normality ? to_json(*m.normality) : json(nullptr);
  return out;
}

MetricsReport metrics_from_json(const json& j) {
  MetricsReport m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.horizon = j.at("horizon").get<long>();
  m.mode = j.at("mode").get<std::string>();
  m.final_error_norms = j.at("final_error_norms").get<std::vector<double>>();
  if (!j.at("final_centralized_error").is_null())
    m.final_centralized_error = j.at("final_centralized_error").get<double>();
  if (!j.at("communication").is_null()) {
    const json& c = j.at("communication");
    CommunicationStats s;
    s.rate = c.at("rate").get<double>();
    s.broadcasts = c.at("broadcasts").get<long>();
    s.forced_broadcasts = c.at("forced_broadcasts").get<long>();
    s.horizon = c.at("horizon").get<long>();
    for (const auto& a : c.at("agents")) {
      AgentIntervals ai;
      ai.broadcasts = a.at("broadcasts").get<long>();
      ai.rate = a.at("rate").get<double>();
      ai.intervals = a.at("intervals").get<std::vector<long>>();
      ai.first_decile_mean = real_from(a.at("first_decile_mean"));
      ai.last_decile_mean = real_from(a.at("last_decile_mean"));
      ai.growth_ratio = real_from(a.at("growth_ratio"));
      s.agents.push_back(std::move(ai));
    }
    m.communication = std::move(s);
  }
  for (const auto& d : j.at("tau0_decay_checks"))
    m.tau0_decay_checks.push_back({d.at("label").get<std::string>(),
                                   d.at("tau0").get<double>(),
                                   d.at("tail_slope").get<double>(),
                                   d.at("hypothesis_ok").get<bool>()});
  if (!j.at("normality").is_null()) {
    const json& n = j.at("normality");
    NormalityResult r;
    r.sample_cov = matrix_from_json(n.at("sample_cov"), "sample_cov");
    r.s_c = matrix_from_json(n.at("s_c"), "s_c");
    r.relative_error = real_from(n.at("relative_error"));
    r.n_runs = n.at("n_runs").get<int>();
    r.t_eval = n.at("t_eval").get<long>();
    m.normality = std::move(r);
  }
  return m;
}

std::string provenance_line(const SimConfig& config) {
  json p = {{"seed", config.seed}, {"config", config_to_json(config)}};
  return "# " + p.dump();
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  const int n = trace.config.system.param_dim();
  out << provenance_line(trace.config) << '\n' << std::setprecision(17);
  const bool with_u = !trace.records.empty() && trace.records.front().centralized;

  if (!trace.has_distributed) {
    out << "step";
    for (int k = 0; k < n; ++k) out << ",u_" << k;
    out << ",error_norm\n";
    for (const auto& r : trace.records) {
      out << r.t;
      write_row(out, r.centralized->transpose());
      out << ',' << (*r.centralized - trace.config.system.theta()).norm() << '\n';
    }
    return;
  }

  out << "step,agent";
  for (int k = 0; k < n; ++k) out << ",x_" << k;
  out << ",error_norm,consensus_dev,triggered";
  if (with_u)
    for (int k = 0; k < n; ++k) out << ",u_" << k;
  out << '\n';
  for (const auto& r : trace.records) {
    for (Eigen::Index i = 0; i < r.estimates.rows(); ++i) {
      out << r.t << ',' << i;
      write_row(out, r.estimates.row(i));
      out << ',' << r.error_norms[i] << ',' << r.consensus_deviation[i] << ','
          << (r.triggered.empty() ? 0 : static_cast<int>(r.triggered[static_cast<std::size_t>(i)]));
      if (with_u) write_row(out, r.centralized->transpose());
      out << '\n';
    }
  }
}

void write_triggers_csv(std::ostream& out, const SimTrace& trace) {
  out << provenance_line(trace.config) << '\n' << "step,agent,triggered\n";
  const auto agents = trace.trigger_times.size();
  std::vector<std::size_t> cursor(agents, 0);
  for (long t = 0; t <= trace.config.horizon; ++t) {
    for (std::size_t i = 0; i < agents; ++i) {
      const auto& times = trace.trigger_times[i];
      const bool fired = cursor[i] < times.size() && times[cursor[i]] == t;
      if (fired) ++cursor[i];
      out << t << ',' << i << ',' << (fired ? 1 : 0) << '\n';
    }
  }
}

std::vector<std::filesystem::path> write_plot_data(
    const std::filesystem::path& dir, const SimTrace& trace) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const std::string header = provenance_line(trace.config);
  auto series = [&](const std::string& name, auto&& value_of) {
    const auto path = dir / name;
    std::ofstream f(path);
    f << header << "\nstep,value\n" << std::setprecision(17);
    for (const auto& r : trace.records) f << r.t << ',' << value_of(r) << '\n';
    written.push_back(path);
  };

  const Eigen::VectorXd& theta = trace.config.system.theta();
  const int n = trace.config.system.param_dim();
  if (trace.has_distributed) {
    for (int k = 0; k < n; ++k)
      series("average_estimate_" + std::to_string(k) + ".csv",
             [k](const StepRecord& r) { return r.estimates.col(k).mean(); });
    for (int i = 0; i < trace.config.system.agents(); ++i)
      series("error_agent_" + std::to_string(i) + ".csv",
             [i](const StepRecord& r) { return r.error_norms[i]; });
    series("consensus_deviation.csv", [](const StepRecord& r) {
      return r.consensus_deviation.maxCoeff();
    });
  }
  if (!trace.records.empty() && trace.records.front().centralized) {
    for (int k = 0; k < n; ++k)
      series("centralized_estimate_" + std::to_string(k) + ".csv",
             [k](const StepRecord& r) { return (*r.centralized)[k]; });
    series("centralized_error.csv", [&theta](const StepRecord& r) {
      return (*r.centralized - theta).norm();
    });
  }
  for (std::size_t i = 0; i < trace.trigger_times.size(); ++i) {
    const auto path = dir / ("trigger_instants_agent_" + std::to_string(i) + ".csv");
    std::ofstream f(path);
    f << header << "\nstep,value\n";
    for (long t : trace.trigger_times[i]) f << t << ',' << i << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace etd
