#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "hvacdro/distributions.hpp"
#include "hvacdro/errors.hpp"
#include "oracles.hpp"

using namespace hvacdro;

namespace {

DiscreteDistribution random_distribution(std::mt19937_64& rng, int max_points) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1 + static_cast<int>(u(rng) * max_points);
  std::vector<double> pts;
  std::vector<double> w;
  for (int i = 0; i < n; ++i) {
    // Quarter-degree lattice so supports overlap between draws.
    pts.push_back(70.0 + 0.25 * std::floor(u(rng) * 40.0));
    w.push_back(u(rng) + 0.01);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return DiscreteDistribution::merged(pts, w);
}

ForecastSeries flat_series(double mu, double sigma, std::size_t steps) {
  ForecastSeries f;
  f.mean.assign(steps, mu);
  f.stddev.assign(steps, sigma);
  return f;
}

}  // namespace

TEST(Distribution, RejectsMalformedInput) {
  EXPECT_THROW(DiscreteDistribution({}, {}), InputError);
  EXPECT_THROW(DiscreteDistribution({1.0, 1.0}, {0.5, 0.5}), InputError);
  EXPECT_THROW(DiscreteDistribution({2.0, 1.0}, {0.5, 0.5}), InputError);
  EXPECT_THROW(DiscreteDistribution({1.0, 2.0}, {0.5, 0.6}), InputError);
  EXPECT_THROW(DiscreteDistribution({1.0, 2.0}, {-0.1, 1.1}), InputError);
}

TEST(Distribution, MergedSumsDuplicates) {
  const std::vector<double> pts{3.0, 1.0, 3.0};
  const std::vector<double> w{0.25, 0.5, 0.25};
  const auto d = DiscreteDistribution::merged(pts, w);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.support()[1], 3.0);
  EXPECT_DOUBLE_EQ(d.probs()[1], 0.5);
  EXPECT_DOUBLE_EQ(d.mean(), 2.0);
  EXPECT_EQ(d.quantile(0.5), 1.0);
  EXPECT_EQ(d.quantile(0.51), 3.0);
}

TEST(Wasserstein, PointMasses) {
  EXPECT_DOUBLE_EQ(wasserstein_distance(DiscreteDistribution::point_mass(75), DiscreteDistribution::point_mass(77)).distance, 2.0);
}

TEST(Wasserstein, HandComputedSplit) {
  const DiscreteDistribution q({0.0, 1.0}, {0.5, 0.5});
  const DiscreteDistribution p({0.0, 3.0}, {0.25, 0.75});
  // 0.25 stays at 0, 0.25 moves 0 -> 3, 0.5 moves 1 -> 3.
  const auto r = wasserstein_distance(q, p);
  EXPECT_NEAR(r.distance, 0.25 * 3.0 + 0.5 * 2.0, 1e-15);
  EXPECT_NEAR(r.plan.at(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(r.plan.at(1, 1), 0.5, 1e-15);
}

TEST(Wasserstein, PlanHasRequestedMarginals) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto q = random_distribution(rng, 12);
    const auto p = random_distribution(rng, 12);
    const auto r = wasserstein_distance(q, p);
    for (std::size_t i = 0; i < q.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j) row += r.plan.at(i, j);
      EXPECT_NEAR(row, q.probs()[i], 1e-12);
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) col += r.plan.at(i, j);
      EXPECT_NEAR(col, p.probs()[j], 1e-12);
    }
  }
}

TEST(Wasserstein, MonotoneCouplingMatchesTransportLp) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto q = random_distribution(rng, 10);
    const auto p = random_distribution(rng, 10);
    EXPECT_NEAR(wasserstein_distance(q, p).distance, wasserstein_distance_lp(q, p).distance, 1e-9);
  }
}

TEST(Wasserstein, MetricAxioms) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_distribution(rng, 20);
    const auto b = random_distribution(rng, 20);
    const auto c = random_distribution(rng, 20);
    const double ab = wasserstein_distance(a, b).distance;
    EXPECT_NEAR(ab, wasserstein_distance(b, a).distance, 1e-9);
    EXPECT_LE(wasserstein_distance(a, c).distance, ab + wasserstein_distance(b, c).distance + 1e-8);
    EXPECT_EQ(wasserstein_distance(a, a).distance, 0.0);
  }
}

TEST(Wasserstein, ZeroAfterMergingDuplicatePoints) {
  const std::vector<double> pts{76.0, 75.0, 76.0, 77.5};
  const std::vector<double> w{0.1, 0.4, 0.2, 0.3};
  const auto merged = DiscreteDistribution::merged(pts, w);
  const DiscreteDistribution direct({75.0, 76.0, 77.5}, {0.4, 0.1 + 0.2, 0.3});
  EXPECT_EQ(wasserstein_distance(merged, direct).distance, 0.0);
}

TEST(WorstTwoPoint, EvenSplitExample) {
  const auto d = worst_two_point(75.0, 2.0, 74.0, 78.0);
  EXPECT_NEAR(d.probs()[0], 0.5, 1e-12);
  EXPECT_NEAR(d.probs()[1], 0.5, 1e-12);
}

TEST(WorstTwoPoint, MatchesTransportOracleOnExamplePairs) {
  const std::pair<double, double> pairs[] = {{75, 77}, {74, 78}, {75, 78}, {76, 78}, {74, 79}, {75, 79}, {76, 79}};
  for (const auto& [a, b] : pairs) {
    const auto d = worst_two_point(75.0, 2.0, a, b);
    const double oracle_mean = oracle::transport_primal_max(DiscreteDistribution::point_mass(75.0), {a, b}, 2.0, 1.0);
    EXPECT_NEAR(d.mean(), oracle_mean, 1e-9) << a << "," << b;
    EXPECT_LE(wasserstein_distance(DiscreteDistribution::point_mass(75.0), d).distance, 2.0 + 1e-12);
  }
}

TEST(WorstTwoPoint, RandomPairsMatchOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 200) {
    const double c = 70.0 + 10.0 * u(rng);
    const double r = 4.0 * u(rng);
    const double x1 = 66.0 + 18.0 * u(rng);
    const double x2 = x1 + 0.1 + 6.0 * u(rng);
    if (x2 < c || std::min(std::abs(c - x1), std::abs(c - x2)) > r) continue;
    const auto d = worst_two_point(c, r, x1, x2);
    ASSERT_NEAR(d.mean(), oracle::transport_primal_max(DiscreteDistribution::point_mass(c), {x1, x2}, r, 1.0), 1e-9);
    ++checked;
  }
}

TEST(WorstTwoPoint, DomainErrors) {
  EXPECT_THROW(worst_two_point(75.0, 2.0, 78.0, 74.0), DomainError);
  EXPECT_THROW(worst_two_point(75.0, 2.0, 70.0, 74.0), DomainError);
  EXPECT_THROW(worst_two_point(75.0, 0.5, 70.0, 80.0), DomainError);
}

TEST(Discretize, CellMassesMatchIntegratedDensity) {
  ForecastSeries f = flat_series(74.3, 0.8, 1);
  f.grid_segments = 40;
  const auto d = discretize_forecast(f, 0);
  ASSERT_EQ(d.size(), 40u);
  const double w = f.cell_width();
  double total = 0.0;
  for (int k = 1; k + 1 < 40; ++k) {
    const double lo = f.grid_low + k * w;
    const double expected = oracle::normal_cdf(lo + w, 74.3, 0.8) - oracle::normal_cdf(lo, 74.3, 0.8);
    EXPECT_NEAR(d.probs()[k], expected, 1e-10) << "cell " << k;
    EXPECT_NEAR(d.support()[k], lo + 0.5 * w, 1e-12);
  }
  for (double p : d.probs()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(d.mean(), 74.3, 0.01);
}

TEST(Discretize, TailsFoldIntoBoundaryCells) {
  ForecastSeries f = flat_series(75.0, 3.0, 1);
  f.grid_low = 65.0;
  f.grid_high = 85.0;
  f.grid_segments = 10;
  const auto d = discretize_forecast(f, 0);
  EXPECT_NEAR(d.probs()[0], oracle::normal_cdf(67.0, 75.0, 3.0), 1e-10);
  EXPECT_NEAR(d.probs()[9], 1.0 - oracle::normal_cdf(83.0, 75.0, 3.0), 1e-10);
}

TEST(Discretize, SymmetricAboutCellCenteredMean) {
  ForecastSeries f = flat_series(75.1, 0.5, 1);
  const auto d = discretize_forecast(f, 0);
  // 75.1 is the midpoint of cell 50 on the default grid.
  for (int k = 1; k <= 40; ++k) EXPECT_NEAR(d.probs()[50 - k], d.probs()[50 + k], 1e-14) << k;
}

TEST(Discretize, ZeroSigmaIsPointMassInContainingCell) {
  const auto d = discretize_forecast(flat_series(75.05, 0.0, 1), 0);
  EXPECT_EQ(d.probs()[50], 1.0);
  EXPECT_NEAR(d.support()[50], 75.1, 1e-12);
}

TEST(Forecast, ValidationRejectsMeansNearGridEdge) {
  EXPECT_THROW(flat_series(66.0, 1.0, 2).validate(), InputError);
  EXPECT_NO_THROW(flat_series(75.0, 1.0, 2).validate());
}

TEST(Sampling, RegularIsDeterministicAndPrefixStable) {
  const auto f = flat_series(75.0, 0.5, 24);
  const auto a = sample_regular(f, 50, 42);
  const auto b = sample_regular(f, 50, 42);
  const auto c = sample_regular(f, 20, 42);
  EXPECT_EQ(a.data(), b.data());
  for (std::size_t h = 0; h < 20; ++h) {
    for (std::size_t t = 0; t < 24; ++t) EXPECT_EQ(a.at(h, t), c.at(h, t));
  }
  EXPECT_NE(sample_regular(f, 50, 43).data(), a.data());
  EXPECT_EQ(a.generator(), "regular");
  EXPECT_EQ(a.seed(), 42u);
}

TEST(Sampling, RegularMomentsMatchForecast) {
  const auto f = flat_series(75.0, 0.5, 10);
  const auto s = sample_regular(f, 20000, 9);
  double sum = 0.0;
  double sq = 0.0;
  for (double v : s.data()) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(s.data().size());
  const double mean = sum / n;
  EXPECT_NEAR(mean, 75.0, 0.01);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 0.5, 0.01);
}

TEST(Sampling, ExtremeStaysOnGridAndIsWider) {
  auto f = flat_series(75.0, 0.5, 24);
  const auto s = sample_extreme(f, 2000, 1);
  double dev = 0.0;
  for (double v : s.data()) {
    EXPECT_GE(v, f.grid_low);
    EXPECT_LE(v, f.grid_high);
    dev += (v - 75.0) * (v - 75.0);
  }
  EXPECT_GT(std::sqrt(dev / static_cast<double>(s.data().size())), 1.0);
  EXPECT_EQ(sample_extreme(f, 2000, 1).data(), s.data());
}

TEST(Sampling, SubstreamSeedsDiffer) {
  EXPECT_NE(substream_seed(1, 0), substream_seed(1, 1));
  EXPECT_NE(substream_seed(1, 0), substream_seed(2, 0));
  EXPECT_EQ(substream_seed(5, 3), substream_seed(5, 3));
}

TEST(Csv, ScenarioRoundTrip) {
  const auto s = sample_regular(flat_series(75.0, 0.5, 5), 4, 2);
  std::stringstream buffer;
  write_scenarios_csv(s, buffer);
  const auto back = read_scenarios_csv(buffer);
  ASSERT_EQ(back.rows(), 4u);
  ASSERT_EQ(back.cols(), 5u);
  for (std::size_t i = 0; i < s.data().size(); ++i) EXPECT_NEAR(back.data()[i], s.data()[i], 1e-7);
}

TEST(Csv, ScenarioErrorsCarryLineNumbers) {
  std::stringstream bad("t1,t2\n75,76\n75\n");
  try {
    read_scenarios_csv(bad);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, DistributionRoundTripMergesDuplicates) {
  std::stringstream in("support,prob\n75,0.25\n74,0.5\n75,0.25\n");
  const auto d = read_distribution_csv(in);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.probs()[1], 0.5);
  std::stringstream out;
  write_distribution_csv(d, out);
  const auto again = read_distribution_csv(out);
  EXPECT_EQ(again.support(), d.support());
  EXPECT_EQ(again.probs(), d.probs());
}
