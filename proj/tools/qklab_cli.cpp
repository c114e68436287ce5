// Command-line front end: run a scenario file (or bundled scenario) and list the catalogue.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qklab/scenario.hpp"

#ifndef QKLAB_SCENARIO_DIR
#define QKLAB_SCENARIO_DIR "scenarios"
#endif

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

std::filesystem::path scenario_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QKLAB_SCENARIOS")) return env;
  return QKLAB_SCENARIO_DIR;
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw qklab::ScenarioError("--tolerance", "expected KEY=VAL, got '" + item + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() - eq - 1 || !(v >= 0.0))
      throw qklab::ScenarioError("--tolerance", "'" + item.substr(eq + 1) + "' is not a non-negative number");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification scenarios for quaternion-Kähler and hyperKähler constructions"};
  app.require_subcommand(1);
  std::string dir_flag;
  app.add_option("--scenarios", dir_flag, "Directory of bundled scenarios");

  CLI::App* run = app.add_subcommand("run", "Run a scenario file or bundled scenario name");
  std::string target;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::vector<std::string> tolerances;
  std::string out_path;
  bool quiet = false;
  run->add_option("scenario", target, "Scenario file or bundled name")->required();
  run->add_option("--seed", seed, "Override the sampling seed");
  run->add_option("--samples", samples, "Override the sample count")->check(CLI::PositiveNumber);
  run->add_option("--tolerance", tolerances, "Tolerance override KEY=VAL (row name or check type)")
      ->allow_extra_args(false);
  run->add_option("--out", out_path, "Write the structured report (JSON) here");
  run->add_flag("--quiet", quiet, "Do not print the table");

  CLI::App* list = app.add_subcommand("list", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::filesystem::path dir = scenario_dir(dir_flag);
  if (list->parsed()) {
    for (const auto& name : qklab::list_scenarios(dir)) std::cout << name << "\n";
    return 0;
  }

  try {
    qklab::RunOptions options;
    options.seed = seed;
    options.samples = samples;
    options.tolerances = parse_tolerances(tolerances);
    const qklab::Report report = qklab::run_scenario_file(qklab::resolve_scenario(target, dir), options);
    if (!quiet) {
      std::cout << qklab::format_table(report);
      std::cout << "elapsed " << static_cast<long long>(report.elapsed_ms) << " ms\n";
    }
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitConfig;
      }
      out << qklab::report_to_json(report, true).dump(2) << "\n";
    }
    return report.all_passed ? 0 : kExitFailed;
  } catch (const qklab::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}
