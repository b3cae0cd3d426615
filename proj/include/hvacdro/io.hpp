#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hvacdro/evaluation.hpp"
#include "hvacdro/formulations.hpp"

namespace hvacdro {

/// Where the SP-average program takes its expectation from.
enum class SpAverageSource { kDistributions, kScenarios };

/// One solvable entry of a run configuration.
struct MethodEntry {
  std::string label;
  Method method = Method::kDo;
  double sigma_k = 3.0;
  DroConfig dro;
  SpAverageSource sp_source = SpAverageSource::kDistributions;

  /// Lower-case label usable in file names ("DRO-2.5" -> "dro-2.5").
  std::string file_tag() const;
};

/// Which scenario set's realized mean cost goes into the comparison cost column.
enum class CostBasis { kRegular, kExtreme };

struct RunConfig {
  ProblemInstance instance;
  std::filesystem::path output_dir = "out";
  std::vector<MethodEntry> methods;
  std::size_t test_scenarios = 1000;
  std::size_t training_scenarios = 1000;
  std::uint64_t seed_regular = 20240501;
  std::uint64_t seed_extreme = 20240502;
  std::uint64_t seed_training = 20240503;
  CostBasis cost_basis = CostBasis::kRegular;
  /// Keep per-scenario vectors in report JSON files.
  bool per_scenario_output = false;

  void validate() const;
};

/// Synthetic practical instance with DO, RO-2sigma, RO-3sigma, SP-strict,
/// SP-average and DRO at radii 0, 1, 2, 2.5.
RunConfig default_run_config();

/// Method list used when a configuration does not name any.
std::vector<MethodEntry> default_methods();

MethodEntry make_method_entry(Method method, double sigma_k = 3.0, double radius = 0.0);

/// Parses an instance document. `source` prefixes error messages, which
/// carry the 1-based line of the offending value.
ProblemInstance parse_instance(const std::string& text, const std::string& source = "<instance>");
ProblemInstance load_instance(const std::filesystem::path& path);
/// Per-step serialization (bands are expanded).
std::string instance_to_json(const ProblemInstance& inst);

/// Relative instance paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>",
                           const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

// CSV: header step,x with 1-based steps.
void write_schedule_csv(const Schedule& schedule, std::ostream& out);
Schedule read_schedule_csv(std::istream& in, const std::string& source = "<schedule>");

std::string report_to_json(const EvaluationReport& report, bool per_scenario);

/// Shortest decimal that round-trips the double.
std::string format_number(double value);

}  // namespace hvacdro
