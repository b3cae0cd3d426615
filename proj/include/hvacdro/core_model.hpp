#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hvacdro {

struct HorizonConfig {
  int step_count = 144;
  double step_hours = 0.1;
  /// Steps the unit must hold its mode after a switch.
  int min_run_steps = 4;
  /// Mode assumed before the first step (0 = off).
  int initial_state = 0;

  void validate() const;
};

/// ARX indoor-temperature model and linear power regression.
///
///   T_in[t] = b1 * x[t] + b2 * T_oa[t] + b3 * T_in[t-1] + b0
///   P[t]    = a1 * x[t] + a2 * T_oa[t] + a0
struct BuildingModel {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a0 = 0.0;
  double t_in_initial = 0.0;

  /// Rejects |b3| >= 1 and coefficients that contradict cooling (b1 > 0, a1 < 0).
  void validate() const;
};

struct TariffSchedule {
  std::vector<double> price_per_step;  // $/kWh

  void validate(const HorizonConfig& horizon) const;
};

struct ComfortBand {
  std::vector<double> upper_per_step;  // degF

  void validate(const HorizonConfig& horizon) const;
};

struct Schedule {
  std::vector<int> on_off;
  int pre_horizon_state = 0;

  std::size_t size() const { return on_off.size(); }
  std::vector<double> as_doubles() const;
};

struct AmbientTrajectory {
  std::vector<double> temp_per_step;  // degF
};

std::vector<double> simulate_indoor(const BuildingModel& model, const Schedule& schedule,
                                    std::span<const double> ambient);
std::vector<double> power_series(const BuildingModel& model, const Schedule& schedule,
                                 std::span<const double> ambient);
double total_cost(const TariffSchedule& tariff, const HorizonConfig& horizon,
                  std::span<const double> power);

/// Closed-form unrolling of the ARX recursion. With 0-based steps,
///
///   T_in[t] = sum_{k<=t} alpha(t,k) x[k] + sum_{k<=t} beta(t,k) T_oa[k] + gamma(t)
///
/// where alpha(t,k) = b1 b3^(t-k), beta(t,k) = b2 b3^(t-k) and
/// gamma(t) = b0 (1 + b3 + ... + b3^t) + b3^(t+1) T_in_initial.
class AffineTemperatureMap {
 public:
  AffineTemperatureMap(const BuildingModel& model, const HorizonConfig& horizon);

  int steps() const { return steps_; }
  double alpha(int t, int k) const { return k > t ? 0.0 : b1_ * decay_[t - k]; }
  double beta(int t, int k) const { return k > t ? 0.0 : b2_ * decay_[t - k]; }
  double gamma(int t) const { return gamma_[t]; }

  /// Sum of beta(t,k) * ambient[k] + gamma(t): the schedule-independent part.
  double ambient_offset(int t, std::span<const double> ambient) const;
  double evaluate(int t, std::span<const double> x, std::span<const double> ambient) const;
  std::vector<double> evaluate_all(std::span<const double> x, std::span<const double> ambient) const;

 private:
  int steps_;
  double b1_;
  double b2_;
  std::vector<double> decay_;  // b3^d for d = 0..T-1
  std::vector<double> gamma_;
};

AffineTemperatureMap unroll_affine(const BuildingModel& model, const HorizonConfig& horizon);

/// True iff every run that starts with a switch inside the horizon lasts at
/// least min_run_steps, or reaches the horizon end first. A leading run equal
/// to the pre-horizon state is a continuation and is not checked.
bool check_min_updown(const Schedule& schedule, const HorizonConfig& horizon);

}  // namespace hvacdro
