#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hvacdro/commands.hpp"
#include "hvacdro/errors.hpp"
#include "hvacdro/evaluation.hpp"
#include "hvacdro/formulations.hpp"
#include "hvacdro/instances.hpp"
#include "hvacdro/io.hpp"

namespace py = pybind11;
using namespace hvacdro;

namespace {

std::vector<double> row_vector(const ScenarioSet& set, std::size_t h) {
  if (h >= set.rows()) throw py::index_error("scenario index out of range");
  const auto r = set.row(h);
  return {r.begin(), r.end()};
}

MethodParams make_params(const ProblemInstance& inst, Method method, double sigma_k, double epsilon,
                         const std::string& mode, int support_points, std::size_t training,
                         std::uint64_t seed) {
  MethodParams p;
  p.sigma_k = sigma_k;
  p.dro.radius = epsilon;
  if (mode != "monolithic" && mode != "reduced") throw InputError("mode must be 'reduced' or 'monolithic'");
  p.dro.mode = mode == "monolithic" ? DroMode::kMonolithic : DroMode::kReduced;
  p.dro.support_points = support_points;
  if (method == Method::kSpStrict) p.scenarios = sample_regular(inst.forecast, training, seed);
  if (method == Method::kSpAverage) p.sp_distributions = discretize_all(inst.forecast);
  return p;
}

}  // namespace

PYBIND11_MODULE(_hvacdro, m) {
  m.doc() = "Day-ahead HVAC on/off scheduling under ambient temperature uncertainty";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InfeasibleModel>(m, "InfeasibleModel", PyExc_RuntimeError);

  py::class_<HorizonConfig>(m, "HorizonConfig")
      .def(py::init<>())
      .def(py::init([](int steps, double step_hours, int min_run_steps, int initial_state) {
             return HorizonConfig{steps, step_hours, min_run_steps, initial_state};
           }),
           py::arg("steps"), py::arg("step_hours"), py::arg("min_run_steps") = 1, py::arg("initial_state") = 0)
      .def_readwrite("steps", &HorizonConfig::step_count)
      .def_readwrite("step_hours", &HorizonConfig::step_hours)
      .def_readwrite("min_run_steps", &HorizonConfig::min_run_steps)
      .def_readwrite("initial_state", &HorizonConfig::initial_state);

  py::class_<BuildingModel>(m, "BuildingModel")
      .def(py::init<>())
      .def(py::init([](double b1, double b2, double b3, double b0, double a1, double a2, double a0, double t0) {
             return BuildingModel{b1, b2, b3, b0, a1, a2, a0, t0};
           }),
           py::arg("b1"), py::arg("b2"), py::arg("b3"), py::arg("b0"), py::arg("a1"), py::arg("a2"), py::arg("a0"),
           py::arg("t_in_initial"))
      .def_readwrite("b1", &BuildingModel::b1)
      .def_readwrite("b2", &BuildingModel::b2)
      .def_readwrite("b3", &BuildingModel::b3)
      .def_readwrite("b0", &BuildingModel::b0)
      .def_readwrite("a1", &BuildingModel::a1)
      .def_readwrite("a2", &BuildingModel::a2)
      .def_readwrite("a0", &BuildingModel::a0)
      .def_readwrite("t_in_initial", &BuildingModel::t_in_initial);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readwrite("horizon", &ProblemInstance::horizon)
      .def_readwrite("model", &ProblemInstance::model)
      .def_property_readonly("prices", [](const ProblemInstance& i) { return i.tariff.price_per_step; })
      .def_property_readonly("comfort_upper", [](const ProblemInstance& i) { return i.comfort.upper_per_step; })
      .def_property_readonly("forecast_mean", [](const ProblemInstance& i) { return i.forecast.mean; })
      .def_property_readonly("forecast_sigma", [](const ProblemInstance& i) { return i.forecast.stddev; })
      .def("to_json", &instance_to_json);

  m.def("synthetic_practical_instance", &synthetic_practical_instance, py::arg("steps") = 144);
  m.def("intuitive_instance", &intuitive_instance, py::arg("candidate_support") = std::vector<double>{});
  m.def("parse_instance", &parse_instance, py::arg("text"), py::arg("source") = "<instance>");
  m.def("load_instance", &load_instance, py::arg("path"));

  py::class_<DiscreteDistribution>(m, "DiscreteDistribution")
      .def(py::init([](const std::vector<double>& support, const std::vector<double>& probs) {
             return DiscreteDistribution::merged(support, probs);
           }),
           py::arg("support"), py::arg("probs"))
      .def_property_readonly("support", &DiscreteDistribution::support)
      .def_property_readonly("probs", &DiscreteDistribution::probs)
      .def("mean", &DiscreteDistribution::mean)
      .def("__len__", &DiscreteDistribution::size);

  m.def(
      "wasserstein",
      [](const DiscreteDistribution& a, const DiscreteDistribution& b) { return wasserstein_distance(a, b).distance; },
      py::arg("a"), py::arg("b"));
  m.def("worst_two_point", &worst_two_point, py::arg("center"), py::arg("radius"), py::arg("xi1"), py::arg("xi2"));
  m.def(
      "inner_worst_expectation",
      [](const DiscreteDistribution& q, double radius, double b2, const std::vector<double>& candidates) {
        const auto w = inner_worst_expectation(q, radius, b2, candidates);
        return py::make_tuple(w.value, w.dual.lambda, w.dual.s);
      },
      py::arg("q"), py::arg("radius"), py::arg("b2"), py::arg("candidates") = std::vector<double>{},
      "Returns (value, lambda, s) of the worst-case expectation of b2 * xi.");

  m.def(
      "simulate",
      [](const BuildingModel& model, const std::vector<int>& x, const std::vector<double>& ambient, int pre) {
        return simulate_indoor(model, Schedule{x, pre}, ambient);
      },
      py::arg("model"), py::arg("schedule"), py::arg("ambient"), py::arg("pre_horizon_state") = 0);
  m.def(
      "check_min_updown",
      [](const std::vector<int>& x, int pre, int run) {
        return check_min_updown(Schedule{x, pre}, HorizonConfig{static_cast<int>(x.size()), 1.0, run, pre});
      },
      py::arg("schedule"), py::arg("pre_horizon_state"), py::arg("min_run_steps"));

  m.def(
      "solve_method",
      [](const ProblemInstance& inst, const std::string& method, double sigma_k, double epsilon,
         const std::string& mode, int support_points, std::size_t training, std::uint64_t seed) {
        const Method which = parse_method(method);
        const auto r = solve_method(inst, which,
                                    make_params(inst, which, sigma_k, epsilon, mode, support_points, training, seed));
        py::dict out;
        out["schedule"] = r.schedule.on_off;
        out["objective"] = r.objective;
        out["nodes"] = r.stats.nodes;
        out["pivots"] = r.stats.pivots;
        out["dro_offsets"] = r.dro_offsets;
        return out;
      },
      py::arg("instance"), py::arg("method"), py::arg("sigma_k") = 3.0, py::arg("epsilon") = 0.0,
      py::arg("mode") = "reduced", py::arg("support_points") = 0, py::arg("training_scenarios") = 1000,
      py::arg("seed") = 20240503);

  m.def(
      "sample",
      [](const ProblemInstance& inst, const std::string& family, std::size_t count, std::uint64_t seed) {
        if (family != "regular" && family != "extreme") throw InputError("family must be 'regular' or 'extreme'");
        const auto set = family == "regular" ? sample_regular(inst.forecast, count, seed)
                                             : sample_extreme(inst.forecast, count, seed);
        std::vector<std::vector<double>> rows;
        for (std::size_t h = 0; h < set.rows(); ++h) rows.push_back(row_vector(set, h));
        return rows;
      },
      py::arg("instance"), py::arg("family"), py::arg("count"), py::arg("seed"));

  m.def(
      "evaluate",
      [](const ProblemInstance& inst, const std::vector<int>& x, const std::string& family, std::size_t count,
         std::uint64_t seed) {
        if (family != "regular" && family != "extreme") throw InputError("family must be 'regular' or 'extreme'");
        const auto set = family == "regular" ? sample_regular(inst.forecast, count, seed)
                                             : sample_extreme(inst.forecast, count, seed);
        const auto rep = evaluate_set(inst, Schedule{x, inst.horizon.initial_state}, set);
        py::dict out;
        out["cost"] = rep.mean_cost;
        out["v_num"] = rep.mean_violation_count;
        out["v_mil"] = rep.mean_violation_mileage;
        out["costs"] = rep.costs;
        out["violation_counts"] = rep.violation_counts;
        out["violation_mileages"] = rep.violation_mileages;
        return out;
      },
      py::arg("instance"), py::arg("schedule"), py::arg("family") = "regular", py::arg("count") = 1000,
      py::arg("seed") = 20240501);

  m.def("table1", [] {
    py::list rows;
    for (const auto& r : table1_rows()) {
      py::dict d;
      d["xi1"] = r.xi1;
      d["xi2"] = r.xi2;
      d["p1"] = r.p1;
      d["p2"] = r.p2;
      d["indoor_off"] = r.indoor_off;
      d["indoor_on"] = r.indoor_on;
      d["decision"] = r.decision;
      rows.append(d);
    }
    return rows;
  });
}
