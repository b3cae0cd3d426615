#include <gtest/gtest.h>

#include <random>

#include "hvacdro/errors.hpp"
#include "hvacdro/formulations.hpp"
#include "hvacdro/instances.hpp"
#include "oracles.hpp"

using namespace hvacdro;

namespace {

DiscreteDistribution random_center(std::mt19937_64& rng, int max_points) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1 + static_cast<int>(u(rng) * max_points);
  std::vector<double> pts;
  std::vector<double> w;
  for (int i = 0; i < n; ++i) {
    pts.push_back(65.0 + 20.0 * u(rng));
    w.push_back(u(rng) + 1e-3);
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return DiscreteDistribution::merged(pts, w);
}

double step_indoor_off(const ProblemInstance& inst, double ambient) {
  return inst.model.b2 * ambient + inst.model.b3 * inst.model.t_in_initial + inst.model.b0;
}

}  // namespace

TEST(InnerWorst, SameSupportClosedForm) {
  const DiscreteDistribution q({74.0, 75.0, 76.0, 78.0}, {0.1, 0.4, 0.3, 0.2});
  for (double eps : {0.0, 0.3, 1.0, 2.0, 10.0}) {
    const auto w = inner_worst_expectation(q, eps, 0.15);
    EXPECT_NEAR(w.value, 0.15 * std::min(q.mean() + eps, 78.0), 1e-12) << eps;
  }
}

TEST(InnerWorst, PointMassCenterOnTwoCandidates) {
  const std::vector<double> candidates{74.0, 78.0};
  const auto w = inner_worst_expectation(DiscreteDistribution::point_mass(75.0), 2.0, 1.0, candidates);
  EXPECT_NEAR(w.value, 76.0, 1e-12);
  EXPECT_NEAR(w.value, worst_two_point(75.0, 2.0, 74.0, 78.0).mean(), 1e-12);
}

TEST(InnerWorst, DualCertificateIsFeasibleAndTight) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto q = random_center(rng, 15);
    const double eps = 3.0 * u(rng);
    const double b2 = 0.05 + u(rng);
    const auto w = inner_worst_expectation(q, eps, b2);
    ASSERT_GE(w.dual.lambda, 0.0);
    ASSERT_EQ(w.dual.s.size(), q.size());
    double objective = eps * w.dual.lambda;
    for (std::size_t i = 0; i < q.size(); ++i) {
      objective += q.probs()[i] * w.dual.s[i];
      for (double xi : q.support()) {
        EXPECT_GE(std::abs(q.support()[i] - xi) * w.dual.lambda + w.dual.s[i], b2 * xi - 1e-9);
      }
    }
    EXPECT_NEAR(objective, w.value, 1e-9);
  }
}

TEST(InnerWorst, MatchesPrimalTransportAndDualLp) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto q = random_center(rng, 12);
    std::vector<double> candidates;
    const bool own_support = trial % 2 == 0;
    if (!own_support) {
      const auto c = random_center(rng, 8);
      candidates = c.support();
    }
    const double b2 = 0.05 + u(rng);
    const std::vector<double>& cands = own_support ? q.support() : candidates;
    double reach = 0.0;
    for (double z : q.support()) {
      double nearest = 1e300;
      for (double xi : cands) nearest = std::min(nearest, std::abs(z - xi));
      reach = std::max(reach, nearest);
    }
    // The ball must contain some distribution on the candidates.
    const double eps = reach + 2.0 * u(rng);
    const auto w = inner_worst_expectation(q, eps, b2, candidates);
    EXPECT_NEAR(w.value, oracle::transport_primal_max(q, cands, eps, b2), 1e-7) << trial;
    EXPECT_NEAR(w.value, oracle::dual_lp_min(q, cands, eps, b2), 1e-7) << trial;
  }
}

TEST(InnerWorst, RejectsEmptyBall) {
  const std::vector<double> candidates{80.0};
  EXPECT_THROW(inner_worst_expectation(DiscreteDistribution::point_mass(75.0), 1.0, 1.0, candidates), DomainError);
  EXPECT_THROW(inner_worst_expectation(DiscreteDistribution::point_mass(75.0), -1.0, 1.0), InputError);
}

TEST(Methods, ParseAndPrint) {
  for (Method m : {Method::kDo, Method::kSpStrict, Method::kSpAverage, Method::kRo, Method::kDro}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("lp"), InputError);
}

TEST(Intuitive, DeterministicStaysOff) {
  const auto inst = intuitive_instance({75.0, 77.0});
  EXPECT_NEAR(step_indoor_off(inst, 75.0), 75.7, 1e-12);
  const auto r = solve_method(inst, Method::kDo, {});
  EXPECT_EQ(r.schedule.on_off, std::vector<int>{0});
  EXPECT_NEAR(r.objective, 0.1 * 0.3 * 75.0, 1e-12);
}

TEST(Intuitive, DroTurnsOnWhenWorstCaseOvershoots) {
  MethodParams p;
  p.dro.radius = 2.0;
  EXPECT_EQ(solve_method(intuitive_instance({75.0, 77.0}), Method::kDro, p).schedule.on_off, std::vector<int>{1});
  EXPECT_EQ(solve_method(intuitive_instance({74.0, 78.0}), Method::kDro, p).schedule.on_off, std::vector<int>{0});
  EXPECT_EQ(solve_method(intuitive_instance({74.0, 79.0}), Method::kDro, p).schedule.on_off, std::vector<int>{0});
}

TEST(Intuitive, MonolithicAgreesWithReduced) {
  MethodParams p;
  p.dro.radius = 2.0;
  p.dro.mode = DroMode::kMonolithic;
  const auto mono = solve_method(intuitive_instance({75.0, 78.0}), Method::kDro, p);
  EXPECT_EQ(mono.schedule.on_off, std::vector<int>{1});
  p.dro.mode = DroMode::kReduced;
  EXPECT_NEAR(mono.objective, solve_method(intuitive_instance({75.0, 78.0}), Method::kDro, p).objective, 1e-9);
}

TEST(Collapse, RoWithZeroBoxMatchesDeterministic) {
  const auto inst = synthetic_practical_instance(36);
  UncertaintyInterval box{inst.forecast.mean, inst.forecast.mean};
  const auto ro = milp::solve_milp(build_ro(inst, box));
  const auto det = milp::solve_milp(build_do(inst));
  ASSERT_TRUE(ro.optimal());
  ASSERT_TRUE(det.optimal());
  EXPECT_NEAR(ro.objective, det.objective, 1e-9);
}

TEST(Collapse, SingleMeanScenarioMatchesDeterministic) {
  const auto inst = synthetic_practical_instance(36);
  ScenarioSet one(1, 36, "mean", 0);
  for (int t = 0; t < 36; ++t) one.row(0)[t] = inst.forecast.mean[t];
  MethodParams p;
  p.scenarios = one;
  const auto sp = solve_method(inst, Method::kSpStrict, p);
  const auto det = solve_method(inst, Method::kDo, {});
  EXPECT_EQ(sp.schedule.on_off, det.schedule.on_off);
  EXPECT_NEAR(sp.objective, det.objective, 1e-9);
}

TEST(Collapse, ZeroRadiusDroMatchesSpAverageOnGrid) {
  const auto inst = synthetic_practical_instance(48);
  MethodParams sp;
  sp.sp_distributions = discretize_all(inst.forecast);
  MethodParams dro;
  dro.dro.radius = 0.0;
  const auto a = solve_method(inst, Method::kSpAverage, sp);
  const auto b = solve_method(inst, Method::kDro, dro);
  EXPECT_EQ(a.schedule.on_off, b.schedule.on_off);
  EXPECT_NEAR(a.objective, b.objective, 1e-9);
}

TEST(Dro, OffsetsAndCostGrowWithRadius) {
  const auto inst = synthetic_practical_instance(48);
  std::vector<double> previous_offsets;
  double previous_cost = -1.0;
  for (double eps : {0.0, 0.5, 1.0, 2.0}) {
    MethodParams p;
    p.dro.radius = eps;
    const auto r = solve_method(inst, Method::kDro, p);
    ASSERT_EQ(r.dro_offsets.size(), 48u);
    if (!previous_offsets.empty()) {
      for (std::size_t t = 0; t < 48; ++t) EXPECT_GE(r.dro_offsets[t], previous_offsets[t] - 1e-12);
    }
    EXPECT_GE(r.objective, previous_cost - 1e-9);
    previous_offsets = r.dro_offsets;
    previous_cost = r.objective;
  }
}

TEST(Dro, MonolithicMatchesReducedOnSmallGrid) {
  auto inst = synthetic_practical_instance(12);
  for (double eps : {0.5, 1.5}) {
    DroConfig reduced{eps, DroMode::kReduced, 6};
    DroConfig mono{eps, DroMode::kMonolithic, 6};
    const auto a = milp::solve_milp(build_dro(inst, reduced).spec);
    const auto b = milp::solve_milp(build_dro(inst, mono).spec);
    ASSERT_TRUE(a.optimal());
    ASSERT_TRUE(b.optimal());
    EXPECT_NEAR(a.objective, b.objective, 1e-6) << eps;
  }
}

TEST(Dro, MonolithicRefusesLargeModels) {
  const auto inst = synthetic_practical_instance(24);
  EXPECT_THROW(build_dro(inst, DroConfig{1.0, DroMode::kMonolithic, 0}), DomainError);
  EXPECT_THROW(build_dro(synthetic_practical_instance(60), DroConfig{1.0, DroMode::kMonolithic, 10}), DomainError);
}

TEST(Ro, ScheduleMeetsComfortAtUpperEdgeOfBox) {
  const auto inst = synthetic_practical_instance(48);
  MethodParams p;
  p.sigma_k = 2.0;
  const auto r = solve_method(inst, Method::kRo, p);
  const auto box = UncertaintyInterval::sigma_box(inst.forecast, 2.0);
  const auto indoor = simulate_indoor(inst.model, r.schedule, box.upper);
  for (int t = 0; t < 48; ++t) EXPECT_LE(indoor[t], inst.comfort.upper_per_step[t] + 1e-7) << t;
  // The objective prices power at the costlier edge of the box.
  const double at_upper = total_cost(inst.tariff, inst.horizon, power_series(inst.model, r.schedule, box.upper));
  EXPECT_NEAR(r.objective, at_upper, 1e-7);
}

TEST(Sp, StrictScheduleMeetsEveryTrainingScenario) {
  const auto inst = synthetic_practical_instance(36);
  MethodParams p;
  p.scenarios = sample_regular(inst.forecast, 200, 5);
  const auto r = solve_method(inst, Method::kSpStrict, p);
  for (std::size_t h = 0; h < p.scenarios->rows(); ++h) {
    const auto indoor = simulate_indoor(inst.model, r.schedule, p.scenarios->row(h));
    for (int t = 0; t < 36; ++t) ASSERT_LE(indoor[t], inst.comfort.upper_per_step[t] + 1e-7);
  }
}

TEST(Sp, CollapsedStrictRowsMatchExpandedRows) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = oracle::random_instance(rng, 8, 2);
    const auto scenarios = sample_regular(inst.forecast, 15, trial);
    const auto a = milp::solve_milp(build_sp(inst, scenarios, SpMode::kStrict, false));
    const auto b = milp::solve_milp(build_sp(inst, scenarios, SpMode::kStrict, true));
    ASSERT_EQ(a.optimal(), b.optimal());
    if (a.optimal()) EXPECT_NEAR(a.objective, b.objective, 1e-9);
  }
}

TEST(Sp, AverageOfScenariosMatchesEnumeratedMeanTrajectory) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = oracle::random_instance(rng, 7, 3);
    const auto scenarios = sample_regular(inst.forecast, 25, trial);
    std::vector<double> mean(7, 0.0);
    for (std::size_t h = 0; h < 25; ++h) {
      for (int t = 0; t < 7; ++t) mean[t] += scenarios.at(h, t) / 25.0;
    }
    const auto sol = milp::solve_milp(build_sp(inst, scenarios, SpMode::kAverage));
    const auto ref = oracle::enumerate_schedules(inst, mean);
    ASSERT_EQ(sol.optimal(), ref.feasible) << trial;
    if (ref.feasible) EXPECT_NEAR(sol.objective, ref.cost, 1e-7) << trial;
  }
}

TEST(Diagnosis, ReportsTheUnsatisfiableFamily) {
  auto inst = synthetic_practical_instance(24);
  for (auto& bound : inst.comfort.upper_per_step) bound = 60.0;
  try {
    solve_method(inst, Method::kDo, {});
    FAIL() << "expected InfeasibleModel";
  } catch (const InfeasibleModel& e) {
    EXPECT_EQ(e.family(), "comfort");
  }
}

TEST(Instances, SyntheticBandsAndLength) {
  const auto inst = synthetic_practical_instance();
  ASSERT_EQ(inst.horizon.step_count, 144);
  ASSERT_EQ(inst.comfort.upper_per_step.size(), 144u);
  // Step t covers hour 24 t / 144, so 8 am is step 48 and 8 pm is step 120.
  EXPECT_EQ(inst.comfort.upper_per_step[47], 80.0);
  EXPECT_EQ(inst.comfort.upper_per_step[48], 76.0);
  EXPECT_EQ(inst.comfort.upper_per_step[119], 76.0);
  EXPECT_EQ(inst.comfort.upper_per_step[120], 80.0);
  EXPECT_EQ(inst.tariff.price_per_step[71], 0.07);
  EXPECT_EQ(inst.tariff.price_per_step[72], 0.15);
  EXPECT_EQ(inst.tariff.price_per_step[126], 0.07);
  EXPECT_NEAR(inst.forecast.mean[90], 82.0, 1e-12);
}

TEST(Instances, BandExpansionRejectsGapsAndOverlaps) {
  EXPECT_THROW(expand_bands({{0, 10, 1.0}, {11, 24, 2.0}}, 24), InputError);
  EXPECT_THROW(expand_bands({{0, 12, 1.0}, {11, 24, 2.0}}, 24), InputError);
  EXPECT_THROW(expand_bands({{0, 23, 1.0}}, 24), InputError);
  EXPECT_EQ(expand_bands({{0, 12, 1.0}, {12, 24, 2.0}}, 4), (std::vector<double>{1.0, 1.0, 2.0, 2.0}));
}
