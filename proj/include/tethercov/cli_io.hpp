#pragma once

// Run configuration (JSON with unit-suffixed keys), the command
// implementations behind the CLI, and CSV / JSON emission.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tethercov/deployment.hpp"

namespace tethercov {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class OutputFormat { Csv, Json };

struct RunConfig {
  Scenario scenario = Scenario::dense_urban();
  UavMode mode;
  TetherConfig tether;
  std::vector<GroundStation> ground_stations;
  Point3 uav{0.0, 0.0, 100.0};  ///< fixed UAV position for maps, sweeps and validation
  Json experiment = Json::object();
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::string> out_path;
  std::uint64_t seed = 1;
  std::string hash;  ///< FNV-1a of the parsed input document
};

/// Throws ConfigError on unknown keys, missing units, wrong types or invalid
/// values. Presets fill defaults; explicit fields override them one by one.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);
Json dense_urban_config_json();

std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const Json& doc);

OutputFormat parse_format(const std::string& name);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct CommandOutput {
  std::string command;
  Table table;
  std::optional<Json> report;  ///< structured result for JSON output
  bool ok = true;              ///< drives the exit code
};

struct SweepSpec {
  std::string variable;
  std::vector<double> values;
};

/// Accepts {"variable", "values": [...]} or {"variable", "range": [lo, hi, step]}.
SweepSpec parse_sweep(const Json& j);

CommandOutput run_validate(const RunConfig& cfg);
CommandOutput run_coverage_map(const RunConfig& cfg);
CommandOutput run_optimize(const RunConfig& cfg);
CommandOutput run_sweep(const RunConfig& cfg);
CommandOutput run_association_map(const RunConfig& cfg);

Json report_to_json(const OptimizationReport& r);
OptimizationReport report_from_json(const Json& j);

/// CSV: `#` metadata lines (command, schema version, config hash, seed), a
/// header row, then data rows. JSON: one object with the same metadata.
void write_output(std::ostream& os, const CommandOutput& out, OutputFormat format, const RunConfig& cfg);

}  // namespace tethercov
