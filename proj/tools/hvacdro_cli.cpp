#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hvacdro/commands.hpp"
#include "hvacdro/errors.hpp"

namespace {

struct SharedFlags {
  std::string config;
  std::string method;
  std::vector<double> epsilon;
  double sigma_k = 0.0;
  std::size_t scenarios = 0;
  std::uint64_t seed = 0;
  std::string out;

  std::vector<CLI::Option*> options;

  void attach(CLI::App& app) {
    options = {
        app.add_option("--config", config, "Run configuration JSON (default: built-in synthetic day)"),
        app.add_option("--method", method, "Restrict to one method: do, sp_strict, sp_average, ro, dro"),
        app.add_option("--epsilon", epsilon, "Wasserstein radii, comma separated")->delimiter(','),
        app.add_option("--sigma-k", sigma_k, "RO box half-width in forecast standard deviations"),
        app.add_option("--scenarios", scenarios, "Test scenarios per set"),
        app.add_option("--seed", seed, "Base seed for the regular, extreme and training sets"),
        app.add_option("--out", out, "Output directory"),
    };
  }

  hvacdro::RunConfig resolve() const {
    hvacdro::ConfigOverrides o;
    if (options[1]->count()) o.method = method;
    if (options[2]->count()) o.epsilon = epsilon;
    if (options[3]->count()) o.sigma_k = sigma_k;
    if (options[4]->count()) o.scenarios = scenarios;
    if (options[5]->count()) o.seed = seed;
    if (options[6]->count()) o.out = out;
    std::optional<std::filesystem::path> path;
    if (options[0]->count()) path = config;
    return hvacdro::resolve_config(path, o);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead HVAC on/off scheduling under ambient-temperature uncertainty"};
  app.require_subcommand(1);

  SharedFlags solve_flags;
  SharedFlags evaluate_flags;
  SharedFlags compare_flags;
  auto* solve = app.add_subcommand("solve", "Solve the configured methods and write schedules");
  solve_flags.attach(*solve);
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a schedule CSV on a test scenario set");
  evaluate_flags.attach(*evaluate);
  std::string schedule_path;
  std::string set = "regular";
  evaluate->add_option("--schedule", schedule_path, "Schedule CSV (step,x)")->required();
  evaluate->add_option("--set", set, "Scenario set: regular or extreme")->capture_default_str();
  auto* compare = app.add_subcommand("compare", "Solve and evaluate all methods on both scenario sets");
  compare_flags.attach(*compare);
  auto* table1 = app.add_subcommand("table1", "Print the single-step worst-case example table");
  auto* wasserstein = app.add_subcommand("wasserstein", "Print the distance between two support,prob CSV files");
  std::string dist_a;
  std::string dist_b;
  wasserstein->add_option("distA", dist_a, "First distribution CSV")->required();
  wasserstein->add_option("distB", dist_b, "Second distribution CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hvacdro::kExitOk : hvacdro::kExitUsage;
  }

  try {
    if (*solve) return hvacdro::cmd_solve(solve_flags.resolve(), std::cout, std::cerr);
    if (*evaluate) {
      return hvacdro::cmd_evaluate(evaluate_flags.resolve(), schedule_path, set, std::cout, std::cerr);
    }
    if (*compare) return hvacdro::cmd_compare(compare_flags.resolve(), std::cout, std::cerr);
    if (*table1) return hvacdro::cmd_table1(std::cout);
    if (*wasserstein) return hvacdro::cmd_wasserstein(dist_a, dist_b, std::cout, std::cerr);
  } catch (const hvacdro::InfeasibleModel& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return hvacdro::kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hvacdro::kExitUsage;
  }
  return hvacdro::kExitUsage;
}
