#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hvacdro/core_model.hpp"
#include "hvacdro/distributions.hpp"
#include "hvacdro/formulations.hpp"

namespace hvacdro {

/// Overshoots at or below this are treated as meeting the comfort bound.
inline constexpr double kViolationDeadband = 1e-9;

struct ScenarioOutcome {
  double cost = 0.0;
  double violation_count = 0.0;
  double violation_mileage = 0.0;
};

/// Out-of-sample statistics of one schedule over one scenario set.
struct EvaluationReport {
  std::string method;
  std::string scenario_set;
  std::uint64_t seed = 0;
  std::size_t scenario_count = 0;
  double mean_cost = 0.0;
  double mean_violation_count = 0.0;
  double mean_violation_mileage = 0.0;
  /// Per-scenario values, retained up to kRetainLimit scenarios.
  std::vector<double> costs;
  std::vector<double> violation_counts;
  std::vector<double> violation_mileages;

  static constexpr std::size_t kRetainLimit = 10000;

  /// Nearest-rank percentile of a retained per-scenario vector.
  static double percentile(std::span<const double> values, double level);
};

ScenarioOutcome evaluate_one(const ProblemInstance& inst, const Schedule& schedule,
                             std::span<const double> trajectory);

EvaluationReport evaluate_set(const ProblemInstance& inst, const Schedule& schedule,
                              const ScenarioSet& scenarios, const std::string& method = {});

/// Sum with a fixed pairwise split, independent of how the terms were produced.
double pairwise_sum(std::span<const double> values);

struct MethodConfig {
  std::string label;
  Method method = Method::kDo;
  MethodParams params;
};

struct ComparisonRow {
  std::string label;
  std::string scenario_set;
  bool solved = false;
  /// "optimal", "infeasible" or "error".
  std::string status;
  std::string error;
  Schedule schedule;
  double objective = 0.0;
  EvaluationReport report;
};

/// One row per method and set (regular first), in the given method order.
/// Solve failures are recorded in the row.
std::vector<ComparisonRow> compare_methods(const ProblemInstance& inst,
                                           std::span<const MethodConfig> methods,
                                           const ScenarioSet& regular, const ScenarioSet& extreme);

}  // namespace hvacdro
