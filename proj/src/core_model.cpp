#include "hvacdro/core_model.hpp"

#include <cmath>
#include <string>

#include "hvacdro/errors.hpp"

namespace hvacdro {

namespace {

void require_length(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw InputError(std::string(what) + ": expected length " + std::to_string(expected) +
                     ", got " + std::to_string(actual));
  }
}

}  // namespace

void HorizonConfig::validate() const {
  if (step_count < 1) throw InputError("horizon: step_count must be >= 1");
  if (!(step_hours > 0.0)) throw InputError("horizon: step_hours must be > 0");
  if (min_run_steps < 1 || min_run_steps > step_count) {
    throw InputError("horizon: min_run_steps must lie in [1, step_count]");
  }
  if (initial_state != 0 && initial_state != 1) {
    throw InputError("horizon: initial_state must be 0 or 1");
  }
}

void BuildingModel::validate() const {
  if (!(std::abs(b3) < 1.0)) {
    throw InputError("building: |b3| must be < 1 for a stable recursion");
  }
  if (b1 > 0.0) throw InputError("building: b1 must be <= 0 (on-mode cools)");
  if (a1 < 0.0) throw InputError("building: a1 must be >= 0 (on-mode consumes power)");
  for (double v : {b1, b2, b3, b0, a1, a2, a0, t_in_initial}) {
    if (!std::isfinite(v)) throw InputError("building: coefficients must be finite");
  }
}

void TariffSchedule::validate(const HorizonConfig& horizon) const {
  require_length(price_per_step.size(), static_cast<std::size_t>(horizon.step_count), "tariff");
  for (double c : price_per_step) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("tariff: prices must be finite and >= 0");
  }
}

void ComfortBand::validate(const HorizonConfig& horizon) const {
  require_length(upper_per_step.size(), static_cast<std::size_t>(horizon.step_count), "comfort");
  for (double u : upper_per_step) {
    if (!std::isfinite(u)) throw InputError("comfort: bounds must be finite");
  }
}

std::vector<double> Schedule::as_doubles() const {
  return {on_off.begin(), on_off.end()};
}

std::vector<double> simulate_indoor(const BuildingModel& model, const Schedule& schedule,
                                    std::span<const double> ambient) {
  require_length(ambient.size(), schedule.size(), "simulate_indoor ambient");
  std::vector<double> indoor(schedule.size());
  double prev = model.t_in_initial;
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    prev = model.b1 * schedule.on_off[t] + model.b2 * ambient[t] + model.b3 * prev + model.b0;
    indoor[t] = prev;
  }
  return indoor;
}

std::vector<double> power_series(const BuildingModel& model, const Schedule& schedule,
                                 std::span<const double> ambient) {
  require_length(ambient.size(), schedule.size(), "power_series ambient");
  std::vector<double> power(schedule.size());
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    power[t] = model.a1 * schedule.on_off[t] + model.a2 * ambient[t] + model.a0;
  }
  return power;
}

double total_cost(const TariffSchedule& tariff, const HorizonConfig& horizon,
                  std::span<const double> power) {
  require_length(power.size(), tariff.price_per_step.size(), "total_cost power");
  double cost = 0.0;
  for (std::size_t t = 0; t < power.size(); ++t) {
    cost += tariff.price_per_step[t] * horizon.step_hours * power[t];
  }
  return cost;
}

AffineTemperatureMap::AffineTemperatureMap(const BuildingModel& model, const HorizonConfig& horizon)
    : steps_(horizon.step_count), b1_(model.b1), b2_(model.b2) {
  if (!(std::abs(model.b3) < 1.0)) {
    throw InputError("unroll_affine: |b3| must be < 1");
  }
  decay_.resize(steps_);
  gamma_.resize(steps_);
  double power = 1.0;
  double geometric = 0.0;
  for (int d = 0; d < steps_; ++d) {
    decay_[d] = power;
    geometric += power;
    power *= model.b3;
    // power is now b3^(d+1)
    gamma_[d] = model.b0 * geometric + power * model.t_in_initial;
  }
}

double AffineTemperatureMap::ambient_offset(int t, std::span<const double> ambient) const {
  double acc = gamma_[t];
  for (int k = 0; k <= t; ++k) acc += beta(t, k) * ambient[k];
  return acc;
}

double AffineTemperatureMap::evaluate(int t, std::span<const double> x,
                                      std::span<const double> ambient) const {
  double acc = ambient_offset(t, ambient);
  for (int k = 0; k <= t; ++k) acc += alpha(t, k) * x[k];
  return acc;
}

std::vector<double> AffineTemperatureMap::evaluate_all(std::span<const double> x,
                                                       std::span<const double> ambient) const {
  require_length(x.size(), static_cast<std::size_t>(steps_), "affine map schedule");
  require_length(ambient.size(), static_cast<std::size_t>(steps_), "affine map ambient");
  std::vector<double> out(steps_);
  for (int t = 0; t < steps_; ++t) out[t] = evaluate(t, x, ambient);
  return out;
}

AffineTemperatureMap unroll_affine(const BuildingModel& model, const HorizonConfig& horizon) {
  return AffineTemperatureMap(model, horizon);
}

bool check_min_updown(const Schedule& schedule, const HorizonConfig& horizon) {
  const auto& x = schedule.on_off;
  const std::size_t n = x.size();
  const std::size_t min_run = static_cast<std::size_t>(horizon.min_run_steps);
  int previous = schedule.pre_horizon_state;
  for (std::size_t t = 0; t < n; ++t) {
    if (x[t] != 0 && x[t] != 1) return false;
    if (x[t] != previous) {
      std::size_t end = t;
      while (end < n && x[end] == x[t]) ++end;
      if (end < n && end - t < min_run) return false;
    }
    previous = x[t];
  }
  return true;
}

}  // namespace hvacdro
