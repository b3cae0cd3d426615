#include "hvacdro/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "hvacdro/errors.hpp"

namespace hvacdro {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double EvaluationReport::percentile(std::span<const double> values, double level) {
  if (values.empty()) throw InputError("percentile: no retained values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = std::ceil(std::clamp(level, 0.0, 1.0) * static_cast<double>(sorted.size()));
  const std::size_t index = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return sorted[std::min(index, sorted.size() - 1)];
}

ScenarioOutcome evaluate_one(const ProblemInstance& inst, const Schedule& schedule,
                             std::span<const double> trajectory) {
  const std::size_t steps = static_cast<std::size_t>(inst.horizon.step_count);
  if (schedule.size() != steps || trajectory.size() != steps) {
    throw InputError("evaluate_one: schedule and trajectory must match the horizon length");
  }
  const auto indoor = simulate_indoor(inst.model, schedule, trajectory);
  ScenarioOutcome out;
  out.cost = total_cost(inst.tariff, inst.horizon, power_series(inst.model, schedule, trajectory));
  for (std::size_t t = 0; t < steps; ++t) {
    const double overshoot = indoor[t] - inst.comfort.upper_per_step[t];
    if (overshoot > kViolationDeadband) {
      out.violation_count += 1.0;
      out.violation_mileage += overshoot;
    }
  }
  return out;
}

EvaluationReport evaluate_set(const ProblemInstance& inst, const Schedule& schedule,
                              const ScenarioSet& scenarios, const std::string& method) {
  if (scenarios.rows() < 1) throw InputError("evaluate_set: empty scenario set");
  const std::size_t count = scenarios.rows();
  std::vector<double> costs(count);
  std::vector<double> counts(count);
  std::vector<double> mileages(count);
  for (std::size_t h = 0; h < count; ++h) {
    const ScenarioOutcome o = evaluate_one(inst, schedule, scenarios.row(h));
    costs[h] = o.cost;
    counts[h] = o.violation_count;
    mileages[h] = o.violation_mileage;
  }
  EvaluationReport report;
  report.method = method;
  report.scenario_set = scenarios.generator();
  report.seed = scenarios.seed();
  report.scenario_count = count;
  const double n = static_cast<double>(count);
  report.mean_cost = pairwise_sum(costs) / n;
  report.mean_violation_count = pairwise_sum(counts) / n;
  report.mean_violation_mileage = pairwise_sum(mileages) / n;
  if (count <= EvaluationReport::kRetainLimit) {
    report.costs = std::move(costs);
    report.violation_counts = std::move(counts);
    report.violation_mileages = std::move(mileages);
  }
  return report;
}

std::vector<ComparisonRow> compare_methods(const ProblemInstance& inst,
                                           std::span<const MethodConfig> methods,
                                           const ScenarioSet& regular, const ScenarioSet& extreme) {
  std::vector<ComparisonRow> rows;
  for (const auto& config : methods) {
    ComparisonRow base;
    base.label = config.label;
    try {
      MethodResult solved = solve_method(inst, config.method, config.params);
      base.solved = true;
      base.status = "optimal";
      base.schedule = std::move(solved.schedule);
      base.objective = solved.objective;
    } catch (const InfeasibleModel& e) {
      base.status = "infeasible";
      base.error = e.what();
    } catch (const std::exception& e) {
      base.status = "error";
      base.error = e.what();
    }
    for (const ScenarioSet* set : {&regular, &extreme}) {
      ComparisonRow row = base;
      row.scenario_set = set->generator();
      if (row.solved) row.report = evaluate_set(inst, row.schedule, *set, row.label);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace hvacdro
