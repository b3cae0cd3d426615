#include "hvacdro/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hvacdro/errors.hpp"
#include "hvacdro/instances.hpp"

namespace hvacdro {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ":1: cannot write file");
  out << text;
  if (!out) throw InputError(path.string() + ":1: write failed");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError(dir.string() + ":1: cannot create output directory: " + ec.message());
}

bool needs_training(const RunConfig& config) {
  return std::any_of(config.methods.begin(), config.methods.end(), [](const MethodEntry& m) {
    return m.method == Method::kSpStrict ||
           (m.method == Method::kSpAverage && m.sp_source == SpAverageSource::kScenarios);
  });
}

double hour_of(const RunConfig& config, std::size_t t) {
  return 24.0 * static_cast<double>(t) / config.instance.horizon.step_count;
}

json schedule_json(const Schedule& schedule) { return schedule.on_off; }

}  // namespace

RunConfig resolve_config(const std::optional<std::filesystem::path>& config_path,
                         const ConfigOverrides& overrides) {
  RunConfig config;
  if (config_path) {
    if (!std::filesystem::exists(*config_path)) throw InputError(config_path->string() + ":1: config file not found");
    config = load_run_config(*config_path);
  } else {
    config = default_run_config();
  }

  if (overrides.method) {
    const Method method = parse_method(*overrides.method);
    std::vector<MethodEntry> kept;
    for (const auto& m : config.methods) {
      if (m.method == method) kept.push_back(m);
    }
    if (kept.empty()) kept.push_back(make_method_entry(method));
    config.methods = std::move(kept);
  }
  if (overrides.sigma_k) {
    if (!(*overrides.sigma_k > 0.0)) throw InputError("--sigma-k must be > 0");
    std::vector<MethodEntry> next;
    bool placed = false;
    for (const auto& m : config.methods) {
      if (m.method != Method::kRo) {
        next.push_back(m);
      } else if (!placed) {
        next.push_back(make_method_entry(Method::kRo, *overrides.sigma_k));
        placed = true;
      }
    }
    config.methods = std::move(next);
  }
  if (overrides.epsilon) {
    if (overrides.epsilon->empty()) throw InputError("--epsilon list is empty");
    for (double e : *overrides.epsilon) {
      if (!(e >= 0.0)) throw InputError("--epsilon values must be >= 0");
    }
    std::vector<MethodEntry> next;
    bool placed = false;
    for (const auto& m : config.methods) {
      if (m.method != Method::kDro) {
        next.push_back(m);
      } else if (!placed) {
        for (double e : *overrides.epsilon) {
          MethodEntry entry = m;
          entry.dro.radius = e;
          entry.label = make_method_entry(Method::kDro, 3.0, e).label;
          if (m.dro.mode == DroMode::kMonolithic) entry.label += "-monolithic";
          next.push_back(std::move(entry));
        }
        placed = true;
      }
    }
    config.methods = std::move(next);
  }
  if (overrides.scenarios) {
    if (*overrides.scenarios < 1) throw InputError("--scenarios must be >= 1");
    config.test_scenarios = *overrides.scenarios;
  }
  if (overrides.seed) {
    config.seed_regular = *overrides.seed;
    config.seed_extreme = *overrides.seed + 1;
    config.seed_training = *overrides.seed + 2;
  }
  if (overrides.out) config.output_dir = *overrides.out;
  if (config.methods.empty()) throw InputError("no methods selected");
  config.validate();
  return config;
}

ScenarioSet regular_set(const RunConfig& config) {
  return sample_regular(config.instance.forecast, config.test_scenarios, config.seed_regular);
}

ScenarioSet extreme_set(const RunConfig& config) {
  return sample_extreme(config.instance.forecast, config.test_scenarios, config.seed_extreme);
}

ScenarioSet training_set(const RunConfig& config) {
  return sample_regular(config.instance.forecast, config.training_scenarios, config.seed_training);
}

MethodParams method_params(const MethodEntry& entry, const RunConfig& config, const ScenarioSet& training) {
  MethodParams params;
  params.sigma_k = entry.sigma_k;
  params.dro = entry.dro;
  if (entry.method == Method::kSpStrict ||
      (entry.method == Method::kSpAverage && entry.sp_source == SpAverageSource::kScenarios)) {
    params.scenarios = training;
  }
  if (entry.method == Method::kSpAverage && entry.sp_source == SpAverageSource::kDistributions) {
    params.sp_distributions = discretize_all(config.instance.forecast);
  }
  return params;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  ensure_dir(config.output_dir);
  const ScenarioSet training = needs_training(config) ? training_set(config) : ScenarioSet();
  int exit_code = kExitOk;
  for (const auto& entry : config.methods) {
    json log = {{"label", entry.label}, {"method", to_string(entry.method)}};
    try {
      const MethodResult result = solve_method(config.instance, entry.method, method_params(entry, config, training));
      std::ostringstream csv;
      write_schedule_csv(result.schedule, csv);
      const auto csv_path = config.output_dir / ("schedule_" + entry.file_tag() + ".csv");
      write_text(csv_path, csv.str());
      log["status"] = "optimal";
      log["objective"] = result.objective;
      log["nodes"] = result.stats.nodes;
      log["pivots"] = result.stats.pivots;
      log["schedule"] = schedule_json(result.schedule);
      if (!result.dro_offsets.empty()) log["dro_offsets"] = result.dro_offsets;
      out << entry.label << ": objective " << fixed(result.objective, 6) << " -> " << csv_path.string() << "\n";
    } catch (const InfeasibleModel& e) {
      log["status"] = "infeasible";
      log["family"] = e.family();
      log["error"] = e.what();
      err << entry.label << ": infeasible: " << e.what() << "\n";
      if (exit_code == kExitOk) exit_code = kExitInfeasible;
    } catch (const DomainError& e) {
      log["status"] = "error";
      log["error"] = e.what();
      err << entry.label << ": " << e.what() << "\n";
      exit_code = kExitUsage;
    }
    write_text(config.output_dir / ("solve_" + entry.file_tag() + ".json"), log.dump(2) + "\n");
  }
  return exit_code;
}

int cmd_evaluate(const RunConfig& config, const std::filesystem::path& schedule_path, const std::string& set,
                 std::ostream& out, std::ostream& err) {
  if (set != "regular" && set != "extreme") {
    err << "--set must be \"regular\" or \"extreme\"\n";
    return kExitUsage;
  }
  std::ifstream in(schedule_path, std::ios::binary);
  if (!in) {
    err << schedule_path.string() << ":1: cannot open schedule file\n";
    return kExitUsage;
  }
  Schedule schedule = read_schedule_csv(in, schedule_path.string());
  const std::size_t steps = static_cast<std::size_t>(config.instance.horizon.step_count);
  if (schedule.size() != steps) {
    err << schedule_path.string() << ":" << schedule.size() + 1 << ": schedule has " << schedule.size()
        << " steps, instance has " << steps << "\n";
    return kExitUsage;
  }
  schedule.pre_horizon_state = config.instance.horizon.initial_state;

  const ScenarioSet scenarios = set == "regular" ? regular_set(config) : extreme_set(config);
  const std::string stem = schedule_path.stem().string();
  const EvaluationReport report = evaluate_set(config.instance, schedule, scenarios, stem);
  ensure_dir(config.output_dir);
  const auto path = config.output_dir / ("report_" + stem + "_" + set + ".json");
  write_text(path, report_to_json(report, config.per_scenario_output));
  out << stem << " on " << set << " (" << report.scenario_count << " scenarios): cost "
      << fixed(report.mean_cost, 4) << ", V_num " << fixed(report.mean_violation_count, 4) << ", V_mil "
      << fixed(report.mean_violation_mileage, 4) << " -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  ensure_dir(config.output_dir);
  const ScenarioSet regular = regular_set(config);
  const ScenarioSet extreme = extreme_set(config);
  const ScenarioSet training = needs_training(config) ? training_set(config) : ScenarioSet();

  std::vector<MethodConfig> methods;
  for (const auto& entry : config.methods) {
    methods.push_back({entry.label, entry.method, method_params(entry, config, training)});
  }
  const auto rows = compare_methods(config.instance, methods, regular, extreme);

  std::ostringstream csv;
  csv << "method,set,cost,v_num,v_mil,objective,status\n";
  json json_rows = json::array();
  for (const auto& row : rows) {
    csv << row.label << ',' << row.scenario_set << ',';
    json item = {{"method", row.label}, {"set", row.scenario_set}, {"status", row.status}};
    if (row.solved) {
      csv << format_number(row.report.mean_cost) << ',' << format_number(row.report.mean_violation_count) << ','
          << format_number(row.report.mean_violation_mileage) << ',' << format_number(row.objective);
      item["cost"] = row.report.mean_cost;
      item["v_num"] = row.report.mean_violation_count;
      item["v_mil"] = row.report.mean_violation_mileage;
      item["objective"] = row.objective;
    } else {
      csv << ",,,";
      item["error"] = row.error;
    }
    csv << ',' << row.status << '\n';
    json_rows.push_back(std::move(item));
  }

  // One line per method: cost on the configured basis, violations on both sets.
  json table = json::array();
  std::ostringstream text;
  text << "method               cost      regular V_num  V_mil    extreme V_num  V_mil\n";
  int solved = 0;
  int infeasible = 0;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    const auto& reg = rows[i];
    const auto& ext = rows[i + 1];
    if (!reg.solved) {
      if (reg.status == "infeasible") ++infeasible;
      table.push_back({{"method", reg.label}, {"status", reg.status}, {"error", reg.error}});
      char line[160];
      std::snprintf(line, sizeof line, "%-20s %s\n", reg.label.c_str(), reg.status.c_str());
      text << line;
      err << reg.label << ": " << reg.error << "\n";
      continue;
    }
    ++solved;
    const double cost = config.cost_basis == CostBasis::kRegular ? reg.report.mean_cost : ext.report.mean_cost;
    table.push_back({{"method", reg.label},
                     {"status", reg.status},
                     {"cost", cost},
                     {"regular", {{"v_num", reg.report.mean_violation_count}, {"v_mil", reg.report.mean_violation_mileage}}},
                     {"extreme", {{"v_num", ext.report.mean_violation_count}, {"v_mil", ext.report.mean_violation_mileage}}}});
    char line[200];
    std::snprintf(line, sizeof line, "%-20s %9.4f %13.4f %8.4f %14.4f %8.4f\n", reg.label.c_str(), cost,
                  reg.report.mean_violation_count, reg.report.mean_violation_mileage, ext.report.mean_violation_count,
                  ext.report.mean_violation_mileage);
    text << line;
  }

  json summary = {{"scenarios", config.test_scenarios},
                  {"training_scenarios", config.training_scenarios},
                  {"seeds", {{"regular", config.seed_regular}, {"extreme", config.seed_extreme}, {"training", config.seed_training}}},
                  {"cost_basis", config.cost_basis == CostBasis::kRegular ? "regular" : "extreme"},
                  {"rows", std::move(json_rows)},
                  {"table", std::move(table)}};

  // Plot-ready series.
  const std::size_t steps = static_cast<std::size_t>(config.instance.horizon.step_count);
  std::vector<const ComparisonRow*> solved_rows;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    if (rows[i].solved) solved_rows.push_back(&rows[i]);
  }
  std::ostringstream schedules;
  std::ostringstream indoor;
  schedules << "step,hour,price,comfort_upper";
  indoor << "step,hour,comfort_upper";
  for (const auto* row : solved_rows) {
    schedules << ',' << row->label;
    indoor << ',' << row->label;
  }
  schedules << '\n';
  indoor << '\n';
  std::vector<std::vector<double>> indoor_series;
  for (const auto* row : solved_rows) {
    indoor_series.push_back(simulate_indoor(config.instance.model, row->schedule, config.instance.forecast.mean));
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const double hour = hour_of(config, t);
    schedules << t + 1 << ',' << format_number(hour) << ',' << format_number(config.instance.tariff.price_per_step[t])
              << ',' << format_number(config.instance.comfort.upper_per_step[t]);
    indoor << t + 1 << ',' << format_number(hour) << ',' << format_number(config.instance.comfort.upper_per_step[t]);
    for (std::size_t k = 0; k < solved_rows.size(); ++k) {
      schedules << ',' << solved_rows[k]->schedule.on_off[t];
      indoor << ',' << format_number(indoor_series[k][t]);
    }
    schedules << '\n';
    indoor << '\n';
  }

  std::ostringstream fan;
  fan << "step,hour,mean,sigma,minus3,minus2,minus1,plus1,plus2,plus3,q05,q50,q95\n";
  std::vector<double> column(regular.rows());
  for (std::size_t t = 0; t < steps; ++t) {
    const double mu = config.instance.forecast.mean[t];
    const double sd = config.instance.forecast.stddev[t];
    for (std::size_t h = 0; h < regular.rows(); ++h) column[h] = regular.at(h, t);
    fan << t + 1 << ',' << format_number(hour_of(config, t)) << ',' << format_number(mu) << ',' << format_number(sd);
    for (double k : {-3.0, -2.0, -1.0, 1.0, 2.0, 3.0}) fan << ',' << format_number(mu + k * sd);
    for (double q : {0.05, 0.5, 0.95}) fan << ',' << format_number(EvaluationReport::percentile(column, q));
    fan << '\n';
  }

  write_text(config.output_dir / "comparison.csv", csv.str());
  write_text(config.output_dir / "comparison.json", summary.dump(2) + "\n");
  write_text(config.output_dir / "schedules.csv", schedules.str());
  write_text(config.output_dir / "indoor_mean.csv", indoor.str());
  write_text(config.output_dir / "forecast_fan.csv", fan.str());
  out << text.str();

  if (solved > 0) return kExitOk;
  return infeasible > 0 ? kExitInfeasible : kExitUsage;
}

std::vector<Table1Row> table1_rows() {
  constexpr double kCenter = 75.0;
  constexpr double kRadius = 2.0;
  const std::pair<double, double> pairs[] = {{75, 77}, {74, 78}, {75, 78}, {76, 78}, {74, 79}, {75, 79}, {76, 79}};
  std::vector<Table1Row> rows;
  for (const auto& [xi1, xi2] : pairs) {
    const DiscreteDistribution worst = worst_two_point(kCenter, kRadius, xi1, xi2);
    ProblemInstance inst = intuitive_instance({xi1, xi2});
    const BuildingModel& m = inst.model;
    Table1Row row;
    row.xi1 = xi1;
    row.xi2 = xi2;
    for (std::size_t i = 0; i < worst.size(); ++i) {
      if (worst.support()[i] == xi1) row.p1 = worst.probs()[i];
      if (worst.support()[i] == xi2) row.p2 = worst.probs()[i];
    }
    row.indoor_off = m.b2 * worst.mean() + m.b3 * m.t_in_initial + m.b0;
    row.indoor_on = row.indoor_off + m.b1;
    MethodParams params;
    params.dro.radius = kRadius;
    row.decision = solve_method(inst, Method::kDro, params).schedule.on_off.at(0);
    rows.push_back(row);
  }
  return rows;
}

std::string format_table1(const std::vector<Table1Row>& rows) {
  std::ostringstream out;
  out << "index  xi1(p)         xi2(p)         E[Tin|x=0]  E[Tin|x=1]  x*\n";
  int index = 1;
  for (const auto& r : rows) {
    const std::string a = format_number(r.xi1) + "(" + fixed(100.0 * r.p1, 1) + "%)";
    const std::string b = format_number(r.xi2) + "(" + fixed(100.0 * r.p2, 1) + "%)";
    char line[160];
    std::snprintf(line, sizeof line, "%-6d %-14s %-14s %-11s %-11s %d\n", index++, a.c_str(), b.c_str(),
                  fixed(r.indoor_off, 1).c_str(), fixed(r.indoor_on, 1).c_str(), r.decision);
    out << line;
  }
  return out.str();
}

int cmd_table1(std::ostream& out) {
  out << format_table1(table1_rows());
  return kExitOk;
}

int cmd_wasserstein(const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
                    std::ostream& err) {
  auto load = [&](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ":1: cannot open distribution file");
    try {
      return read_distribution_csv(in);
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  };
  (void)err;
  const auto q = load(a);
  const auto p = load(b);
  out << format_number(wasserstein_distance(q, p).distance) << "\n";
  return kExitOk;
}

}  // namespace hvacdro
