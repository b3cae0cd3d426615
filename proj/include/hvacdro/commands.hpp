#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hvacdro/io.hpp"

namespace hvacdro {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInfeasible = 2 };

/// Command-line values that replace parts of a loaded configuration.
struct ConfigOverrides {
  std::optional<std::string> method;
  std::optional<std::vector<double>> epsilon;
  std::optional<double> sigma_k;
  std::optional<std::size_t> scenarios;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// Loads `config_path` (or the default configuration) and applies overrides.
/// `--method` keeps only entries of that method; `--epsilon` and `--sigma-k`
/// replace the radii of DRO entries and the box width of RO entries;
/// `--seed s` sets the regular, extreme and training seeds to s, s+1, s+2.
RunConfig resolve_config(const std::optional<std::filesystem::path>& config_path,
                         const ConfigOverrides& overrides);

/// Scenario sets derived from a configuration's seeds.
ScenarioSet regular_set(const RunConfig& config);
ScenarioSet extreme_set(const RunConfig& config);
ScenarioSet training_set(const RunConfig& config);

MethodParams method_params(const MethodEntry& entry, const RunConfig& config, const ScenarioSet& training);

/// Solves every configured method; writes schedule_<tag>.csv and solve_<tag>.json.
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Writes report_<schedule stem>_<set>.json for `set` in {regular, extreme}.
int cmd_evaluate(const RunConfig& config, const std::filesystem::path& schedule_path, const std::string& set,
                 std::ostream& out, std::ostream& err);

/// Writes comparison.csv, comparison.json, schedules.csv, indoor_mean.csv and forecast_fan.csv.
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);

struct Table1Row {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double indoor_off = 0.0;
  double indoor_on = 0.0;
  int decision = 0;
};

/// Single-step example around a 75 degF forecast, radius 2, for each candidate pair.
std::vector<Table1Row> table1_rows();
std::string format_table1(const std::vector<Table1Row>& rows);
int cmd_table1(std::ostream& out);

int cmd_wasserstein(const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
                    std::ostream& err);

}  // namespace hvacdro
