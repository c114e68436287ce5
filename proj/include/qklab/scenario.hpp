#pragma once

// Declarative verification runs: a JSON document names a base, a model, lifted
// actions and a list of checks; running it yields one report row per residual.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qklab {

/// Malformed or inconsistent configuration; `where` is a JSON path or line:column.
class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& where, const std::string& message);
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

struct CheckRow {
  std::string name;
  std::string check;   // check type that produced the row
  std::string status;  // "pass", "fail" or "error"
  double max_residual = 0.0;
  std::vector<double> worst_point;
  double tolerance = 0.0;
  std::string detail;
};

struct Report {
  std::string scenario;
  std::string description;
  std::uint64_t seed = 1;
  int samples = 20;
  std::vector<CheckRow> checks;
  bool all_passed = true;
  double elapsed_ms = 0.0;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  /// Keyed by row name or check type; wins over the scenario's own map.
  std::map<std::string, double> tolerances;
};

/// Default tolerance for a check type: 1e-8 for first-derivative identities,
/// 1e-7 for curvature-level ones.
double default_tolerance(const std::string& check_type);

/// Validates the whole document first (ScenarioError), then runs every check.
/// Evaluation failures inside a check become rows with status "error".
Report run_scenario(const nlohmann::json& doc, const RunOptions& options = {});

/// Parses the file (ScenarioError with line:column on syntax errors) and runs it.
Report run_scenario_file(const std::filesystem::path& path, const RunOptions& options = {});

/// Structured report {scenario, seed, samples, checks, all_passed}; timing only when asked.
nlohmann::json report_to_json(const Report& report, bool include_timing = false);

/// Aligned human-readable table.
std::string format_table(const Report& report);

/// Sorted stems of *.json files in `dir`.
std::vector<std::string> list_scenarios(const std::filesystem::path& dir);

/// `name_or_path` as an existing file, else `dir/name_or_path.json`.
std::filesystem::path resolve_scenario(const std::string& name_or_path,
                                       const std::filesystem::path& dir);

}  // namespace qklab
