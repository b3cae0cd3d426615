#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvacdro/core_model.hpp"
#include "hvacdro/distributions.hpp"
#include "hvacdro/milp.hpp"

namespace hvacdro {

struct ProblemInstance {
  HorizonConfig horizon;
  BuildingModel model;
  TariffSchedule tariff;
  ComfortBand comfort;
  ForecastSeries forecast;
  /// When non-empty, the forecast is read as a point prediction and the
  /// worst-case distribution may only use these temperatures.
  std::vector<double> candidate_support;

  void validate() const;
};

/// Per-step interval [lower, upper] for the ambient temperature.
struct UncertaintyInterval {
  std::vector<double> lower;
  std::vector<double> upper;

  /// [mu - k sigma, mu + k sigma] around the forecast.
  static UncertaintyInterval sigma_box(const ForecastSeries& forecast, double k);
  void validate(std::size_t steps) const;
};

enum class DroMode { kReduced, kMonolithic };

struct DroConfig {
  double radius = 0.0;
  DroMode mode = DroMode::kReduced;
  /// Grid cells for the discretized forecast; 0 keeps the forecast's own grid.
  int support_points = 0;

  void validate() const;
};

/// Monolithic mode is refused beyond these sizes.
inline constexpr std::size_t kMonolithicMaxSupport = 20;
inline constexpr int kMonolithicMaxSteps = 48;

/// Center distribution and the temperatures a candidate distribution may use.
struct AmbiguitySet {
  DiscreteDistribution center;
  std::vector<double> candidates;
};

/// Multipliers of the radius constraint (lambda) and of the center marginals (s).
struct DualSolution {
  double lambda = 0.0;
  std::vector<double> s;
};

struct WorstExpectation {
  double value = 0.0;
  DualSolution dual;
};

/// max E_P[b2 * xi] over distributions P on `candidates` with W(P, q) <= radius,
/// computed as the dual  min radius*lambda + sum_i q_i s_i  subject to
/// |xi_i - xi_j| lambda + s_i >= b2 xi_j,  lambda >= 0.
/// Empty `candidates` means the support of q.
WorstExpectation inner_worst_expectation(const DiscreteDistribution& q, double radius, double b2,
                                         std::span<const double> candidates = {});

std::vector<AmbiguitySet> ambiguity_sets(const ProblemInstance& inst, const DroConfig& dro);

milp::ModelSpec build_do(const ProblemInstance& inst);

enum class SpMode { kStrict, kAverage };

/// Scenario program. In strict mode the per-scenario comfort rows of a step
/// share their schedule coefficients, so by default only the binding one
/// (largest ambient offset) is emitted; `expand_rows` emits all H rows.
milp::ModelSpec build_sp(const ProblemInstance& inst, const ScenarioSet& scenarios, SpMode mode,
                         bool expand_rows = false);

/// SP-average over per-step distributions (support points weighted by probability).
milp::ModelSpec build_sp_average(const ProblemInstance& inst,
                                 std::span<const DiscreteDistribution> per_step);

milp::ModelSpec build_ro(const ProblemInstance& inst, const UncertaintyInterval& box);

struct DroModel {
  milp::ModelSpec spec;
  /// Reduced mode: worst-case offsets W_t folded into the comfort rows.
  std::vector<double> offsets;
  /// Monolithic mode: variable index of lambda_t and of s_{0,t}.
  std::vector<int> lambda_vars;
  std::vector<int> s_first_var;
};

DroModel build_dro(const ProblemInstance& inst, const DroConfig& dro);
DroModel build_dro(const ProblemInstance& inst, std::span<const AmbiguitySet> sets,
                   const DroConfig& dro);

enum class Method { kDo, kSpStrict, kSpAverage, kRo, kDro };

const char* to_string(Method method);
Method parse_method(const std::string& name);

struct MethodParams {
  /// Training scenarios for the SP methods.
  std::optional<ScenarioSet> scenarios;
  /// SP-average alternative to scenarios.
  std::vector<DiscreteDistribution> sp_distributions;
  double sigma_k = 3.0;
  DroConfig dro;
};

struct MethodResult {
  Schedule schedule;
  double objective = 0.0;
  milp::SolverStats stats;
  std::vector<double> dro_offsets;
};

/// Builds, solves and validates. Throws InfeasibleModel naming the
/// constraint family whose removal restores feasibility.
MethodResult solve_method(const ProblemInstance& inst, Method method, const MethodParams& params);

}  // namespace hvacdro
