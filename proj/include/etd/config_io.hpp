#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "etd/asymptotics.hpp"
#include "etd/metrics.hpp"
#include "etd/monte_carlo.hpp"
#include "etd/schedule.hpp"
#include "etd/simulation.hpp"

namespace etd {

using nlohmann::json;

/// Parses and validates a configuration document. Throws ParseError for
/// malformed or missing fields and DimensionMismatch for inconsistent
/// shapes. Schedule conditions are not enforced here; see validate().
SimConfig parse_config(const json& doc);
SimConfig load_config(const std::filesystem::path& path);

/// Full configuration echo; parse_config(config_to_json(c)) reproduces c.
json config_to_json(const SimConfig& config);

json to_json(const ConditionReport& report);
json to_json(const SpectralCondition& condition);
json to_json(const AsymptoticCovariance& covariance);
json to_json(const BiasStudy& study);
json to_json(const NormalityResult& result);
json to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const json& doc);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const char* what);

/// One-line "# {...}" provenance header carrying seed and config.
std::string provenance_line(const SimConfig& config);

/// step, agent, x_0..x_{n-1}, error_norm, consensus_dev, triggered
/// (+ centralized u_0..u_{n-1} columns when present).
void write_trace_csv(std::ostream& out, const SimTrace& trace);
/// step, agent, triggered for every step 0..T (t = 0 rows are the forced
/// broadcasts).
void write_triggers_csv(std::ostream& out, const SimTrace& trace);
/// Two-column (step, value) series files for external plotting. Returns the
/// paths written.
std::vector<std::filesystem::path> write_plot_data(
    const std::filesystem::path& dir, const SimTrace& trace);

}  // namespace etd
