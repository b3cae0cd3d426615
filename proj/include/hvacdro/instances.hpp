#pragma once

#include <vector>

#include "hvacdro/formulations.hpp"

namespace hvacdro {

/// Time-of-use and comfort values are given as clock-hour bands over a 24 h day.
struct HourBand {
  double start_hour = 0.0;
  double end_hour = 24.0;
  double value = 0.0;
};

/// Expands bands to one value per step; step t starts at hour t * 24 / steps.
/// Bands must tile [0, 24) without gaps or overlaps.
std::vector<double> expand_bands(const std::vector<HourBand>& bands, int steps);

/// Placeholder day profile 75 + 7 sin(2 pi (hour - 9) / 24) degF.
double synthetic_mean_temperature(double hour);

/// Cooling day, 144 steps by default: occupied 8 am-8 pm at 76 degF (80
/// otherwise), on-peak 12 pm-9 pm. Prices and the mean profile are placeholders.
/// Other step counts keep the same bands and building coefficients.
ProblemInstance synthetic_practical_instance(int steps = 144);

/// Single-step example around a 75 degF point forecast with bound 76 degF.
ProblemInstance intuitive_instance(std::vector<double> candidate_support);

}  // namespace hvacdro
