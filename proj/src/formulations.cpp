#include "hvacdro/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hvacdro/errors.hpp"

namespace hvacdro {

using milp::ModelSpec;
using milp::Relation;
using milp::Term;

namespace {

std::vector<int> add_schedule_vars(ModelSpec& spec, int steps) {
  std::vector<int> x(steps);
  for (int t = 0; t < steps; ++t) x[t] = spec.add_binary("x_" + std::to_string(t + 1));
  return x;
}

/// Generalized minimum up/down rows: after a switch at t, x[t+k] keeps the
/// new mode for k = 1..L-1 while t+k is inside the horizon.
void add_min_updown(ModelSpec& spec, const std::vector<int>& x, const HorizonConfig& horizon) {
  const int steps = horizon.step_count;
  const double before = horizon.initial_state;
  for (int t = 0; t < steps; ++t) {
    for (int k = 1; k < horizon.min_run_steps && t + k < steps; ++k) {
      if (t == 0) {
        spec.add_constraint({{x[k], 1.0}, {x[0], -1.0}}, Relation::kGreaterEqual, -before, "min_updown");
        spec.add_constraint({{x[k], -1.0}, {x[0], 1.0}}, Relation::kGreaterEqual, before - 1.0,
                            "min_updown");
      } else {
        spec.add_constraint({{x[t + k], 1.0}, {x[t], -1.0}, {x[t - 1], 1.0}}, Relation::kGreaterEqual,
                            0.0, "min_updown");
        spec.add_constraint({{x[t + k], -1.0}, {x[t], 1.0}, {x[t - 1], -1.0}},
                            Relation::kGreaterEqual, -1.0, "min_updown");
      }
    }
  }
}

std::vector<Term> schedule_terms(const AffineTemperatureMap& map, const std::vector<int>& x, int t) {
  std::vector<Term> terms;
  terms.reserve(t + 1);
  for (int k = 0; k <= t; ++k) {
    const double a = map.alpha(t, k);
    if (a != 0.0) terms.push_back({x[k], a});
  }
  return terms;
}

/// Cost terms: sum_t c_t dt a1 x_t plus the schedule-independent part at `ambient`.
double add_cost_terms(ModelSpec& spec, const ProblemInstance& inst, const std::vector<int>& x,
                      std::span<const double> ambient) {
  double offset = 0.0;
  for (int t = 0; t < inst.horizon.step_count; ++t) {
    const double weight = inst.tariff.price_per_step[t] * inst.horizon.step_hours;
    spec.add_objective(x[t], weight * inst.model.a1);
    offset += weight * (inst.model.a2 * ambient[t] + inst.model.a0);
  }
  return offset;
}

ModelSpec build_from_trajectory(const ProblemInstance& inst, std::span<const double> ambient) {
  inst.validate();
  ModelSpec spec;
  const int steps = inst.horizon.step_count;
  const auto x = add_schedule_vars(spec, steps);
  spec.set_objective_offset(add_cost_terms(spec, inst, x, ambient));
  const AffineTemperatureMap map = unroll_affine(inst.model, inst.horizon);
  for (int t = 0; t < steps; ++t) {
    spec.add_constraint(schedule_terms(map, x, t), Relation::kLessEqual,
                        inst.comfort.upper_per_step[t] - map.ambient_offset(t, ambient), "comfort");
  }
  add_min_updown(spec, x, inst.horizon);
  return spec;
}

// Upper envelope of lines y = intercept - slope_down * lambda on lambda >= 0.
struct Line {
  double slope_down;
  double intercept;
};

struct Envelope {
  std::vector<Line> lines;         // active left to right
  std::vector<double> breakpoints;  // lines[k] -> lines[k+1] at breakpoints[k]
};

Envelope upper_envelope(std::vector<Line> lines) {
  // Ascending slope (-slope_down), ties by intercept; keep the top line per slope.
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.slope_down != b.slope_down) return a.slope_down > b.slope_down;
    return a.intercept < b.intercept;
  });
  auto cross = [](const Line& a, const Line& b) {
    return (a.intercept - b.intercept) / (a.slope_down - b.slope_down);
  };
  std::vector<Line> hull;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (k + 1 < lines.size() && lines[k + 1].slope_down == lines[k].slope_down) continue;
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], lines[k]) <= cross(hull[hull.size() - 2], hull.back())) {
      hull.pop_back();
    }
    hull.push_back(lines[k]);
  }
  Envelope env;
  std::size_t first = 0;
  while (first + 1 < hull.size() && cross(hull[first], hull[first + 1]) <= 0.0) ++first;
  env.lines.assign(hull.begin() + static_cast<std::ptrdiff_t>(first), hull.end());
  for (std::size_t k = 0; k + 1 < env.lines.size(); ++k) {
    env.breakpoints.push_back(cross(env.lines[k], env.lines[k + 1]));
  }
  return env;
}

}  // namespace

void ProblemInstance::validate() const {
  horizon.validate();
  model.validate();
  tariff.validate(horizon);
  comfort.validate(horizon);
  if (forecast.steps() != static_cast<std::size_t>(horizon.step_count)) {
    throw InputError("instance: forecast length differs from the horizon");
  }
  forecast.validate();
  for (std::size_t i = 1; i < candidate_support.size(); ++i) {
    if (!(candidate_support[i] > candidate_support[i - 1])) {
      throw InputError("instance: candidate support must be strictly increasing");
    }
  }
}

UncertaintyInterval UncertaintyInterval::sigma_box(const ForecastSeries& forecast, double k) {
  if (!(k >= 0.0)) throw InputError("sigma_box: k must be >= 0");
  UncertaintyInterval box;
  for (std::size_t t = 0; t < forecast.steps(); ++t) {
    box.lower.push_back(forecast.mean[t] - k * forecast.stddev[t]);
    box.upper.push_back(forecast.mean[t] + k * forecast.stddev[t]);
  }
  return box;
}

void UncertaintyInterval::validate(std::size_t steps) const {
  if (lower.size() != steps || upper.size() != steps) {
    throw InputError("uncertainty interval: length differs from the horizon");
  }
  for (std::size_t t = 0; t < steps; ++t) {
    if (!(lower[t] <= upper[t])) throw InputError("uncertainty interval: lower > upper");
  }
}

void DroConfig::validate() const {
  if (!(radius >= 0.0)) throw InputError("dro: radius must be >= 0");
  if (support_points != 0 && support_points < 2) throw InputError("dro: support_points must be >= 2");
}

WorstExpectation inner_worst_expectation(const DiscreteDistribution& q, double radius, double b2,
                                         std::span<const double> candidates) {
  if (!(radius >= 0.0)) throw InputError("inner_worst_expectation: radius must be >= 0");
  if (candidates.empty()) candidates = q.support();
  const auto& xi = q.support();
  const auto& mass = q.probs();

  // The dual objective g(lambda) = radius*lambda + sum_i q_i h_i(lambda) with
  // h_i(lambda) = max_j (b2 xi_j - lambda |xi_i - xi_j|) is convex and
  // piecewise linear. Sweep its breakpoints left to right until the slope
  // turns nonnegative.
  struct Event {
    double at;
    double slope_gain;
  };
  std::vector<Event> events;
  double slope = radius;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (mass[i] == 0.0) continue;
    std::vector<Line> lines;
    lines.reserve(candidates.size());
    for (double c : candidates) lines.push_back({std::abs(xi[i] - c), b2 * c});
    const Envelope env = upper_envelope(std::move(lines));
    slope -= mass[i] * env.lines.front().slope_down;
    for (std::size_t k = 0; k < env.breakpoints.size(); ++k) {
      events.push_back({env.breakpoints[k],
                        mass[i] * (env.lines[k].slope_down - env.lines[k + 1].slope_down)});
    }
    if (radius == 0.0 && env.lines.back().slope_down > 0.0) {
      throw DomainError("inner_worst_expectation: zero radius but the center is off the candidate support");
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });

  double lambda = 0.0;
  std::size_t e = 0;
  // The slope only accumulates rounding from the event gains.
  while (slope < -1e-12) {
    if (e == events.size()) {
      throw DomainError("inner_worst_expectation: the ball contains no distribution on the candidate support");
    }
    lambda = events[e].at;
    while (e < events.size() && events[e].at == lambda) slope += events[e++].slope_gain;
  }

  WorstExpectation out;
  out.dual.lambda = lambda;
  out.dual.s.resize(q.size());
  out.value = radius * lambda;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double best = -milp::kInfinity;
    for (double c : candidates) best = std::max(best, b2 * c - lambda * std::abs(xi[i] - c));
    out.dual.s[i] = best;
    out.value += mass[i] * best;
  }
  return out;
}

std::vector<AmbiguitySet> ambiguity_sets(const ProblemInstance& inst, const DroConfig& dro) {
  std::vector<AmbiguitySet> sets;
  if (!inst.candidate_support.empty()) {
    for (double mu : inst.forecast.mean) {
      sets.push_back({DiscreteDistribution::point_mass(mu), inst.candidate_support});
    }
    return sets;
  }
  ForecastSeries grid = inst.forecast;
  if (dro.support_points > 0) grid.grid_segments = dro.support_points;
  for (std::size_t t = 0; t < grid.steps(); ++t) {
    DiscreteDistribution q = discretize_forecast(grid, t);
    std::vector<double> candidates = q.support();
    sets.push_back({std::move(q), std::move(candidates)});
  }
  return sets;
}

ModelSpec build_do(const ProblemInstance& inst) {
  return build_from_trajectory(inst, inst.forecast.mean);
}

ModelSpec build_sp(const ProblemInstance& inst, const ScenarioSet& scenarios, SpMode mode,
                   bool expand_rows) {
  inst.validate();
  const int steps = inst.horizon.step_count;
  if (scenarios.rows() < 1) throw InputError("build_sp: empty scenario set");
  if (scenarios.cols() != static_cast<std::size_t>(steps)) {
    throw InputError("build_sp: scenario length differs from the horizon");
  }
  const double count = static_cast<double>(scenarios.rows());
  ModelSpec spec;
  const auto x = add_schedule_vars(spec, steps);

  std::vector<double> mean_ambient(steps, 0.0);
  for (std::size_t h = 0; h < scenarios.rows(); ++h) {
    for (int t = 0; t < steps; ++t) mean_ambient[t] += scenarios.at(h, t);
  }
  double offset = 0.0;
  for (int t = 0; t < steps; ++t) {
    const double weight = inst.tariff.price_per_step[t] * inst.horizon.step_hours;
    spec.add_objective(x[t], weight * inst.model.a1);
  }
  for (std::size_t h = 0; h < scenarios.rows(); ++h) {
    double scenario_cost = 0.0;
    for (int t = 0; t < steps; ++t) {
      const double weight = inst.tariff.price_per_step[t] * inst.horizon.step_hours;
      scenario_cost += weight * (inst.model.a2 * scenarios.at(h, t) + inst.model.a0);
    }
    offset += scenario_cost / count;
  }
  spec.set_objective_offset(offset);

  const AffineTemperatureMap map = unroll_affine(inst.model, inst.horizon);
  for (int t = 0; t < steps; ++t) {
    const double bound = inst.comfort.upper_per_step[t];
    if (mode == SpMode::kAverage) {
      double avg = 0.0;
      for (std::size_t h = 0; h < scenarios.rows(); ++h) avg += map.ambient_offset(t, scenarios.row(h));
      spec.add_constraint(schedule_terms(map, x, t), Relation::kLessEqual, bound - avg / count,
                          "comfort_average");
    } else if (expand_rows) {
      for (std::size_t h = 0; h < scenarios.rows(); ++h) {
        spec.add_constraint(schedule_terms(map, x, t), Relation::kLessEqual,
                            bound - map.ambient_offset(t, scenarios.row(h)), "comfort_strict");
      }
    } else {
      double worst = -milp::kInfinity;
      for (std::size_t h = 0; h < scenarios.rows(); ++h) {
        worst = std::max(worst, map.ambient_offset(t, scenarios.row(h)));
      }
      spec.add_constraint(schedule_terms(map, x, t), Relation::kLessEqual, bound - worst,
                          "comfort_strict");
    }
  }
  add_min_updown(spec, x, inst.horizon);
  return spec;
}

ModelSpec build_sp_average(const ProblemInstance& inst, std::span<const DiscreteDistribution> per_step) {
  if (per_step.size() != static_cast<std::size_t>(inst.horizon.step_count)) {
    throw InputError("build_sp_average: one distribution per step required");
  }
  std::vector<double> expected(per_step.size());
  for (std::size_t t = 0; t < per_step.size(); ++t) expected[t] = per_step[t].mean();
  ModelSpec spec = build_from_trajectory(inst, expected);
  return spec;
}

ModelSpec build_ro(const ProblemInstance& inst, const UncertaintyInterval& box) {
  inst.validate();
  const int steps = inst.horizon.step_count;
  box.validate(static_cast<std::size_t>(steps));
  ModelSpec spec;
  const auto x = add_schedule_vars(spec, steps);
  std::vector<int> z(steps);
  for (int t = 0; t < steps; ++t) {
    z[t] = spec.add_variable("z_" + std::to_string(t + 1), -milp::kInfinity, milp::kInfinity);
    spec.set_objective(z[t], 1.0);
  }
  const auto& m = inst.model;
  for (int t = 0; t < steps; ++t) {
    const double weight = inst.tariff.price_per_step[t] * inst.horizon.step_hours;
    const double at_upper = weight * (m.a2 * box.upper[t] + m.a0);
    const double at_lower = weight * (m.a2 * box.lower[t] + m.a0);
    spec.add_constraint({{z[t], 1.0}, {x[t], -weight * m.a1}}, Relation::kGreaterEqual, at_upper, "ro_cost");
    spec.add_constraint({{z[t], 1.0}, {x[t], -weight * m.a1}}, Relation::kGreaterEqual, at_lower, "ro_cost");
    spec.add_constraint({{z[t], 1.0}}, Relation::kGreaterEqual, at_upper, "ro_cost");
    spec.add_constraint({{z[t], 1.0}}, Relation::kGreaterEqual, at_lower, "ro_cost");
  }
  const AffineTemperatureMap map = unroll_affine(m, inst.horizon);
  for (int t = 0; t < steps; ++t) {
    double worst = map.gamma(t);
    for (int k = 0; k <= t; ++k) {
      const double b = map.beta(t, k);
      worst += std::max(b * box.upper[k], b * box.lower[k]);
    }
    spec.add_constraint(schedule_terms(map, x, t), Relation::kLessEqual,
                        inst.comfort.upper_per_step[t] - worst, "comfort_robust");
  }
  add_min_updown(spec, x, inst.horizon);
  return spec;
}

DroModel build_dro(const ProblemInstance& inst, const DroConfig& dro) {
  inst.validate();
  dro.validate();
  const auto sets = ambiguity_sets(inst, dro);
  return build_dro(inst, sets, dro);
}

DroModel build_dro(const ProblemInstance& inst, std::span<const AmbiguitySet> sets, const DroConfig& dro) {
  inst.validate();
  dro.validate();
  const int steps = inst.horizon.step_count;
  if (sets.size() != static_cast<std::size_t>(steps)) {
    throw InputError("build_dro: one ambiguity set per step required");
  }
  if (dro.mode == DroMode::kMonolithic) {
    for (const auto& set : sets) {
      if (set.center.size() > kMonolithicMaxSupport || set.candidates.size() > kMonolithicMaxSupport ||
          steps > kMonolithicMaxSteps) {
        throw DomainError("build_dro: monolithic mode is limited to " +
                          std::to_string(kMonolithicMaxSupport) + " support points and " +
                          std::to_string(kMonolithicMaxSteps) +
                          " steps; use reduced mode or set support_points");
      }
    }
  }

  const auto& m = inst.model;
  std::vector<double> state_ambient(steps);
  for (int t = 0; t < steps; ++t) state_ambient[t] = sets[t].center.mean();

  DroModel out;
  ModelSpec& spec = out.spec;
  const auto x = add_schedule_vars(spec, steps);
  spec.set_objective_offset(add_cost_terms(spec, inst, x, inst.forecast.mean));
  const AffineTemperatureMap map = unroll_affine(m, inst.horizon);

  for (int t = 0; t < steps; ++t) {
    // Everything in the step-t row except the worst-case ambient term:
    // b3 * E[T_in(t-1)] + b0, with the previous state at the center means.
    const double previous = t == 0 ? m.t_in_initial : map.ambient_offset(t - 1, state_ambient);
    const double fixed = m.b3 * previous + m.b0;
    const double bound = inst.comfort.upper_per_step[t] - fixed;
    std::vector<Term> terms = schedule_terms(map, x, t);

    if (dro.mode == DroMode::kReduced) {
      const WorstExpectation worst =
          inner_worst_expectation(sets[t].center, dro.radius, m.b2, sets[t].candidates);
      out.offsets.push_back(worst.value);
      spec.add_constraint(std::move(terms), Relation::kLessEqual, bound - worst.value, "dro_comfort");
      continue;
    }

    const auto& center = sets[t].center;
    const int lambda = spec.add_variable("lambda_" + std::to_string(t + 1), 0.0, milp::kInfinity);
    out.lambda_vars.push_back(lambda);
    std::vector<int> s(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
      s[i] = spec.add_variable("s_" + std::to_string(i + 1) + "_" + std::to_string(t + 1),
                               -milp::kInfinity, milp::kInfinity);
    }
    out.s_first_var.push_back(s.front());
    terms.push_back({lambda, dro.radius});
    for (std::size_t i = 0; i < center.size(); ++i) terms.push_back({s[i], center.probs()[i]});
    spec.add_constraint(std::move(terms), Relation::kLessEqual, bound, "dro_comfort");
    for (std::size_t i = 0; i < center.size(); ++i) {
      for (double c : sets[t].candidates) {
        spec.add_constraint({{lambda, std::abs(center.support()[i] - c)}, {s[i], 1.0}},
                            Relation::kGreaterEqual, m.b2 * c, "dro_dual");
      }
    }
  }
  add_min_updown(spec, x, inst.horizon);
  return out;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::kDo: return "do";
    case Method::kSpStrict: return "sp_strict";
    case Method::kSpAverage: return "sp_average";
    case Method::kRo: return "ro";
    case Method::kDro: return "dro";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::kDo, Method::kSpStrict, Method::kSpAverage, Method::kRo, Method::kDro}) {
    if (name == to_string(m)) return m;
  }
  throw InputError("unknown method '" + name + "' (expected do, sp_strict, sp_average, ro, dro)");
}

MethodResult solve_method(const ProblemInstance& inst, Method method, const MethodParams& params) {
  MethodResult result;
  ModelSpec spec;
  DroModel dro_model;
  switch (method) {
    case Method::kDo:
      spec = build_do(inst);
      break;
    case Method::kSpStrict:
    case Method::kSpAverage: {
      const SpMode mode = method == Method::kSpStrict ? SpMode::kStrict : SpMode::kAverage;
      if (mode == SpMode::kAverage && !params.sp_distributions.empty()) {
        spec = build_sp_average(inst, params.sp_distributions);
      } else if (params.scenarios) {
        spec = build_sp(inst, *params.scenarios, mode);
      } else {
        throw InputError(std::string(to_string(method)) + ": requires a scenario set");
      }
      break;
    }
    case Method::kRo:
      if (!(params.sigma_k > 0.0)) throw InputError("ro: sigma_k must be > 0");
      spec = build_ro(inst, UncertaintyInterval::sigma_box(inst.forecast, params.sigma_k));
      break;
    case Method::kDro:
      dro_model = build_dro(inst, params.dro);
      spec = dro_model.spec;
      break;
  }

  const milp::Solution sol = milp::solve_milp(spec);
  if (sol.status == milp::SolveStatus::kUnbounded) {
    throw std::logic_error("solve_method: relaxation unbounded");
  }
  if (!sol.optimal()) {
    for (const auto& family : spec.families()) {
      if (milp::solve_milp(spec.without_family(family)).optimal()) {
        throw InfeasibleModel(family, std::string(to_string(method)) +
                                          ": infeasible; constraint family '" + family +
                                          "' cannot be satisfied");
      }
    }
    throw InfeasibleModel("", std::string(to_string(method)) + ": infeasible");
  }

  const int steps = inst.horizon.step_count;
  result.schedule.pre_horizon_state = inst.horizon.initial_state;
  result.schedule.on_off.resize(steps);
  for (int t = 0; t < steps; ++t) {
    const double v = sol.values[t];
    if (std::abs(v - std::round(v)) > milp::kIntegralityTol) {
      throw std::logic_error("solve_method: non-integral schedule returned by the solver");
    }
    result.schedule.on_off[t] = static_cast<int>(std::lround(v));
  }
  if (!check_min_updown(result.schedule, inst.horizon)) {
    throw std::logic_error("solve_method: schedule violates the minimum up/down rule");
  }
  result.objective = sol.objective;
  result.stats = sol.stats;
  if (method == Method::kDro) {
    if (params.dro.mode == DroMode::kReduced) {
      result.dro_offsets = dro_model.offsets;
    } else {
      const auto sets = ambiguity_sets(inst, params.dro);
      for (int t = 0; t < steps; ++t) {
        double w = params.dro.radius * sol.values[dro_model.lambda_vars[t]];
        for (std::size_t i = 0; i < sets[t].center.size(); ++i) {
          w += sets[t].center.probs()[i] * sol.values[dro_model.s_first_var[t] + static_cast<int>(i)];
        }
        result.dro_offsets.push_back(w);
      }
    }
  }
  return result;
}

}  // namespace hvacdro
