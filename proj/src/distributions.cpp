#include "hvacdro/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "hvacdro/errors.hpp"
#include "hvacdro/milp.hpp"

namespace hvacdro {

namespace {

constexpr double kMassTol = 1e-12;

double upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& text, std::size_t line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used == 0 || used != text.size()) {
    throw InputError("line " + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty()) throw InputError("distribution: empty support");
  if (support_.size() != probs_.size()) {
    throw InputError("distribution: support and probability lengths differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!std::isfinite(support_[i])) throw InputError("distribution: non-finite support point");
    if (!(probs_[i] >= 0.0)) throw InputError("distribution: negative probability");
    if (i > 0 && !(support_[i] > support_[i - 1])) {
      throw InputError("distribution: support must be strictly increasing");
    }
    total += probs_[i];
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw InputError("distribution: probabilities sum to " + std::to_string(total));
  }
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
  return DiscreteDistribution({value}, {1.0});
}

DiscreteDistribution DiscreteDistribution::merged(std::span<const double> points,
                                                  std::span<const double> probs) {
  if (points.size() != probs.size()) {
    throw InputError("distribution: support and probability lengths differ");
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<double> support;
  std::vector<double> mass;
  for (std::size_t idx : order) {
    if (!support.empty() && support.back() == points[idx]) {
      mass.back() += probs[idx];
    } else {
      support.push_back(points[idx]);
      mass.push_back(probs[idx]);
    }
  }
  return DiscreteDistribution(std::move(support), std::move(mass));
}

double DiscreteDistribution::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += support_[i] * probs_[i];
  return acc;
}

double DiscreteDistribution::quantile(double level) const {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    cumulative += probs_[i];
    if (cumulative >= level) return support_[i];
  }
  return support_.back();
}

TransportResult wasserstein_distance(const DiscreteDistribution& q, const DiscreteDistribution& p) {
  TransportResult result;
  const std::size_t rows = q.size();
  const std::size_t cols = p.size();
  result.plan.rows = rows;
  result.plan.cols = cols;
  result.plan.mass.assign(rows * cols, 0.0);
  std::size_t i = 0;
  std::size_t j = 0;
  double left_q = q.probs()[0];
  double left_p = p.probs()[0];
  for (;;) {
    const bool last_i = i + 1 == rows;
    const bool last_j = j + 1 == cols;
    // Once one side is on its final point it absorbs everything the other
    // side still holds, so rounding residue cannot strand mass.
    double moved = std::min(left_q, left_p);
    if (last_i && !last_j) moved = left_p;
    if (last_j && !last_i) moved = left_q;
    moved = std::max(moved, 0.0);
    result.plan.mass[i * cols + j] += moved;
    result.distance += moved * std::abs(q.support()[i] - p.support()[j]);
    if (last_i && last_j) break;
    left_q -= moved;
    left_p -= moved;
    if (last_i) {
      left_p = p.probs()[++j];
    } else if (last_j) {
      left_q = q.probs()[++i];
    } else if (left_q <= left_p) {
      left_q = q.probs()[++i];
    } else {
      left_p = p.probs()[++j];
    }
  }
  return result;
}

TransportResult wasserstein_distance_lp(const DiscreteDistribution& q, const DiscreteDistribution& p) {
  milp::ModelSpec spec;
  const std::size_t rows = q.size();
  const std::size_t cols = p.size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const int v = spec.add_variable("pi_" + std::to_string(i) + "_" + std::to_string(j), 0.0,
                                      milp::kInfinity);
      spec.set_objective(v, std::abs(q.support()[i] - p.support()[j]));
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<milp::Term> terms;
    for (std::size_t j = 0; j < cols; ++j) terms.push_back({static_cast<int>(i * cols + j), 1.0});
    spec.add_constraint(std::move(terms), milp::Relation::kEqual, q.probs()[i], "row_marginal");
  }
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<milp::Term> terms;
    for (std::size_t i = 0; i < rows; ++i) terms.push_back({static_cast<int>(i * cols + j), 1.0});
    spec.add_constraint(std::move(terms), milp::Relation::kEqual, p.probs()[j], "col_marginal");
  }
  const milp::Solution sol = milp::solve_lp(spec);
  if (!sol.optimal()) throw std::runtime_error("wasserstein_distance_lp: transport LP not solved");
  TransportResult result;
  result.distance = sol.objective;
  result.plan = TransportPlan{rows, cols, sol.values};
  return result;
}

DiscreteDistribution worst_two_point(double center, double radius, double xi1, double xi2) {
  if (!(xi1 < xi2)) throw DomainError("worst_two_point: requires xi1 < xi2");
  if (!(xi2 >= center)) throw DomainError("worst_two_point: requires xi2 >= center");
  if (!(radius >= 0.0)) throw DomainError("worst_two_point: radius must be >= 0");
  if (std::min(std::abs(xi1 - center), std::abs(xi2 - center)) > radius) {
    throw DomainError("worst_two_point: the ball does not reach either support point");
  }
  double upper_mass = 1.0;
  if (xi1 >= center) {
    upper_mass = std::min((center + radius - xi1) / (xi2 - xi1), 1.0);
  } else if (xi1 + xi2 > 2.0 * center) {
    upper_mass = std::min((radius - (center - xi1)) / (xi1 + xi2 - 2.0 * center), 1.0);
  }
  upper_mass = std::clamp(upper_mass, 0.0, 1.0);
  return DiscreteDistribution({xi1, xi2}, {1.0 - upper_mass, upper_mass});
}

void ForecastSeries::validate() const {
  if (mean.empty()) throw InputError("forecast: empty mean series");
  if (mean.size() != stddev.size()) throw InputError("forecast: mean and std lengths differ");
  if (!(grid_low < grid_high)) throw InputError("forecast: grid_low must be < grid_high");
  if (grid_segments < 2) throw InputError("forecast: grid_segments must be >= 2");
  for (std::size_t t = 0; t < mean.size(); ++t) {
    if (!(stddev[t] >= 0.0)) throw InputError("forecast: std must be >= 0");
    if (mean[t] - 3.0 * stddev[t] < grid_low || mean[t] + 3.0 * stddev[t] > grid_high) {
      throw InputError("forecast: mean at step " + std::to_string(t + 1) +
                       " lies within 3 std of the grid edge");
    }
  }
}

DiscreteDistribution discretize_forecast(const ForecastSeries& series, std::size_t t) {
  if (t >= series.steps()) throw InputError("discretize_forecast: step out of range");
  const double mu = series.mean[t];
  const double sigma = series.stddev[t];
  if (!(sigma >= 0.0)) throw InputError("discretize_forecast: std must be >= 0");
  const int segments = series.grid_segments;
  const double width = series.cell_width();
  std::vector<double> support(segments);
  std::vector<double> probs(segments, 0.0);
  for (int k = 0; k < segments; ++k) support[k] = series.grid_low + (k + 0.5) * width;

  if (sigma == 0.0) {
    const int cell = std::clamp(static_cast<int>(std::floor((mu - series.grid_low) / width)), 0,
                                segments - 1);
    probs[cell] = 1.0;
    return DiscreteDistribution(std::move(support), std::move(probs));
  }
  for (int k = 0; k < segments; ++k) {
    const double lo = k == 0 ? -INFINITY : (series.grid_low + k * width - mu) / sigma;
    const double hi = k == segments - 1 ? INFINITY : (series.grid_low + (k + 1) * width - mu) / sigma;
    // Evaluate each cell through the tail that is small on its side of the
    // mean so mirrored cells get bit-for-bit mirrored arithmetic.
    if (support[k] >= mu) {
      probs[k] = upper_tail(lo) - upper_tail(hi);
    } else {
      probs[k] = upper_tail(-hi) - upper_tail(-lo);
    }
  }
  return DiscreteDistribution(std::move(support), std::move(probs));
}

std::vector<DiscreteDistribution> discretize_all(const ForecastSeries& series) {
  std::vector<DiscreteDistribution> out;
  out.reserve(series.steps());
  for (std::size_t t = 0; t < series.steps(); ++t) out.push_back(discretize_forecast(series, t));
  return out;
}

ScenarioSet::ScenarioSet(std::size_t rows, std::size_t cols, std::string generator, std::uint64_t seed)
    : rows_(rows), cols_(cols), generator_(std::move(generator)), seed_(seed), data_(rows * cols, 0.0) {}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScenarioSet sample_regular(const ForecastSeries& series, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw InputError("sample_regular: count must be >= 1");
  ScenarioSet set(count, series.steps(), "regular", seed);
  for (std::size_t h = 0; h < count; ++h) {
    std::mt19937_64 engine(substream_seed(seed, h));
    std::normal_distribution<double> standard(0.0, 1.0);
    auto row = set.row(h);
    for (std::size_t t = 0; t < series.steps(); ++t) {
      const double value = series.mean[t] + series.stddev[t] * standard(engine);
      row[t] = std::clamp(value, series.grid_low, series.grid_high);
    }
  }
  return set;
}

ScenarioSet sample_extreme(const ForecastSeries& series, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw InputError("sample_extreme: count must be >= 1");
  ScenarioSet set(count, series.steps(), "extreme", seed);
  using Uniform = std::uniform_real_distribution<double>;
  for (std::size_t h = 0; h < count; ++h) {
    std::mt19937_64 engine(substream_seed(seed, h));
    auto row = set.row(h);
    const int family = std::uniform_int_distribution<int>(0, 2)(engine);
    if (family == 0) {
      const double offset = Uniform(-2.0, 2.0)(engine);
      const double spread = Uniform(0.5, 2.0)(engine);
      std::normal_distribution<double> standard(0.0, 1.0);
      for (std::size_t t = 0; t < series.steps(); ++t) {
        row[t] = series.mean[t] + offset + spread * standard(engine);
      }
    } else if (family == 1) {
      const double half_width = Uniform(1.0, 4.0)(engine);
      Uniform unit(-1.0, 1.0);
      for (std::size_t t = 0; t < series.steps(); ++t) {
        row[t] = series.mean[t] + half_width * unit(engine);
      }
    } else {
      const double a = Uniform(0.5, 5.0)(engine);
      const double b = Uniform(0.5, 5.0)(engine);
      std::gamma_distribution<double> ga(a, 1.0);
      std::gamma_distribution<double> gb(b, 1.0);
      for (std::size_t t = 0; t < series.steps(); ++t) {
        const double x = ga(engine);
        const double y = gb(engine);
        const double unit = x + y > 0.0 ? x / (x + y) : 0.5;
        row[t] = series.mean[t] - 3.0 + 6.0 * unit;
      }
    }
    for (auto& v : row) v = std::clamp(v, series.grid_low, series.grid_high);
  }
  return set;
}

void write_scenarios_csv(const ScenarioSet& set, std::ostream& out) {
  for (std::size_t t = 0; t < set.cols(); ++t) out << (t ? "," : "") << 't' << t + 1;
  out << '\n' << std::setprecision(10);
  for (std::size_t h = 0; h < set.rows(); ++h) {
    for (std::size_t t = 0; t < set.cols(); ++t) out << (t ? "," : "") << set.at(h, t);
    out << '\n';
  }
}

ScenarioSet read_scenarios_csv(std::istream& in, const std::string& generator, std::uint64_t seed) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("line 1: missing header");
  strip_cr(line);
  const auto header = split_csv_line(line);
  for (std::size_t t = 0; t < header.size(); ++t) {
    if (header[t] != "t" + std::to_string(t + 1)) {
      throw InputError("line 1: expected header column t" + std::to_string(t + 1));
    }
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " columns");
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("scenario CSV has no rows");
  ScenarioSet set(rows.size(), header.size(), generator, seed);
  for (std::size_t h = 0; h < rows.size(); ++h) std::copy(rows[h].begin(), rows[h].end(), set.row(h).begin());
  return set;
}

void write_distribution_csv(const DiscreteDistribution& dist, std::ostream& out) {
  out << "support,prob\n" << std::setprecision(17);
  for (std::size_t i = 0; i < dist.size(); ++i) out << dist.support()[i] << ',' << dist.probs()[i] << '\n';
}

DiscreteDistribution read_distribution_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("line 1: missing header");
  strip_cr(line);
  if (line != "support,prob") throw InputError("line 1: expected header 'support,prob'");
  std::vector<double> support;
  std::vector<double> probs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) throw InputError("line " + std::to_string(line_no) + ": expected 2 columns");
    support.push_back(parse_number(cells[0], line_no));
    probs.push_back(parse_number(cells[1], line_no));
  }
  return DiscreteDistribution::merged(support, probs);
}

}  // namespace hvacdro
