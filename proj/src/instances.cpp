#include "hvacdro/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hvacdro/errors.hpp"

namespace hvacdro {

std::vector<double> expand_bands(const std::vector<HourBand>& bands, int steps) {
  if (steps < 1) throw InputError("bands: step count must be >= 1");
  std::vector<HourBand> sorted = bands;
  std::sort(sorted.begin(), sorted.end(),
            [](const HourBand& a, const HourBand& b) { return a.start_hour < b.start_hour; });
  double cursor = 0.0;
  for (const auto& band : sorted) {
    if (!(band.end_hour > band.start_hour)) throw InputError("bands: end_hour must exceed start_hour");
    if (band.start_hour != cursor) {
      throw InputError(band.start_hour < cursor ? "bands: overlapping bands"
                                                : "bands: gap before hour " + std::to_string(band.start_hour));
    }
    cursor = band.end_hour;
  }
  if (cursor != 24.0) throw InputError("bands: must cover [0, 24) hours");

  std::vector<double> out(steps);
  for (int t = 0; t < steps; ++t) {
    const double hour = 24.0 * t / steps;
    for (const auto& band : sorted) {
      if (hour >= band.start_hour && hour < band.end_hour) {
        out[t] = band.value;
        break;
      }
    }
  }
  return out;
}

double synthetic_mean_temperature(double hour) {
  return 75.0 + 7.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0);
}

ProblemInstance synthetic_practical_instance(int steps) {
  ProblemInstance inst;
  inst.horizon = HorizonConfig{steps, 0.1, std::min(4, steps), 0};
  // b0 is recalibrated so the occupied band is reachable; see README.
  inst.model = BuildingModel{-2.07, 0.15, 0.45, 30.4, 70.7, 0.24, -17.8, 80.0};
  inst.tariff.price_per_step = expand_bands({{0, 12, 0.07}, {12, 21, 0.15}, {21, 24, 0.07}}, steps);
  inst.comfort.upper_per_step = expand_bands({{0, 8, 80.0}, {8, 20, 76.0}, {20, 24, 80.0}}, steps);
  inst.forecast.grid_low = 65.0;
  inst.forecast.grid_high = 85.0;
  inst.forecast.grid_segments = 100;
  for (int t = 0; t < steps; ++t) {
    inst.forecast.mean.push_back(synthetic_mean_temperature(24.0 * t / steps));
    inst.forecast.stddev.push_back(0.5);
  }
  return inst;
}

ProblemInstance intuitive_instance(std::vector<double> candidate_support) {
  ProblemInstance inst;
  inst.horizon = HorizonConfig{1, 1.0, 1, 0};
  inst.model = BuildingModel{-3.0, 0.3, 0.7, 0.0, 100.0, 0.3, 0.0, 76.0};
  inst.tariff.price_per_step = {0.1};
  inst.comfort.upper_per_step = {76.0};
  inst.forecast.mean = {75.0};
  inst.forecast.stddev = {0.0};
  inst.forecast.grid_low = 65.0;
  inst.forecast.grid_high = 85.0;
  inst.forecast.grid_segments = 100;
  inst.candidate_support = std::move(candidate_support);
  return inst;
}

}  // namespace hvacdro
