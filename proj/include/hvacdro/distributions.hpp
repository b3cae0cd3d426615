#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hvacdro {

/// Finite distribution over ambient temperature with strictly increasing support.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> support, std::vector<double> probs);

  static DiscreteDistribution point_mass(double value);
  /// Sorts the points and merges duplicates by summing their probabilities.
  static DiscreteDistribution merged(std::span<const double> points, std::span<const double> probs);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return support_.size(); }
  double mean() const;
  /// Smallest support point whose cumulative probability reaches `level`.
  double quantile(double level) const;

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
};

/// Joint distribution with the two marginals as row and column sums.
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> mass;  // row-major rows x cols

  double at(std::size_t i, std::size_t j) const { return mass[i * cols + j]; }
};

struct TransportResult {
  double distance = 0.0;
  TransportPlan plan;
};

/// Type-1 Wasserstein distance with |xi_i - xi_j| ground cost, via the
/// monotone (north-west corner) coupling, which is optimal on the line.
TransportResult wasserstein_distance(const DiscreteDistribution& q, const DiscreteDistribution& p);

/// Same distance from the transport linear program solved by the simplex kernel.
TransportResult wasserstein_distance_lp(const DiscreteDistribution& q, const DiscreteDistribution& p);

/// Mean-maximizing distribution on {xi1, xi2} inside the ball of radius
/// `radius` around the point mass at `center`. Requires xi1 < xi2,
/// xi2 >= center and a non-empty intersection of the ball with the support.
DiscreteDistribution worst_two_point(double center, double radius, double xi1, double xi2);

struct ForecastSeries {
  std::vector<double> mean;
  std::vector<double> stddev;
  double grid_low = 65.0;
  double grid_high = 85.0;
  int grid_segments = 100;

  std::size_t steps() const { return mean.size(); }
  double cell_width() const { return (grid_high - grid_low) / grid_segments; }
  void validate() const;
};

/// Gaussian forecast at step t binned onto the uniform grid; tails fold
/// into the boundary cells and support points are the cell midpoints.
DiscreteDistribution discretize_forecast(const ForecastSeries& series, std::size_t t);
std::vector<DiscreteDistribution> discretize_all(const ForecastSeries& series);

/// H x T matrix of ambient trajectories.
class ScenarioSet {
 public:
  ScenarioSet() = default;
  ScenarioSet(std::size_t rows, std::size_t cols, std::string generator, std::uint64_t seed);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::string& generator() const { return generator_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> row(std::size_t h) const { return {data_.data() + h * cols_, cols_}; }
  std::span<double> row(std::size_t h) { return {data_.data() + h * cols_, cols_}; }
  double at(std::size_t h, std::size_t t) const { return data_[h * cols_ + t]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::string generator_;
  std::uint64_t seed_ = 0;
  std::vector<double> data_;
};

/// Independent Gaussian draws per step, clamped to the grid.
ScenarioSet sample_regular(const ForecastSeries& series, std::size_t count, std::uint64_t seed);

/// Each scenario picks a family at random: a biased and widened Gaussian, a
/// uniform band around the mean, or a scaled beta. Clamped to the grid.
ScenarioSet sample_extreme(const ForecastSeries& series, std::size_t count, std::uint64_t seed);

/// Counter-derived 64-bit seed for substream `index`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// CSV: header t1..tT then one row per scenario.
void write_scenarios_csv(const ScenarioSet& set, std::ostream& out);
ScenarioSet read_scenarios_csv(std::istream& in, const std::string& generator = "file",
                               std::uint64_t seed = 0);
// CSV: header support,prob.
void write_distribution_csv(const DiscreteDistribution& dist, std::ostream& out);
DiscreteDistribution read_distribution_csv(std::istream& in);

}  // namespace hvacdro
