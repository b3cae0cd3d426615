#include <gtest/gtest.h>

#include <random>

#include "hvacdro/errors.hpp"
#include "hvacdro/formulations.hpp"
#include "hvacdro/milp.hpp"
#include "oracles.hpp"

using namespace hvacdro;
using namespace hvacdro::milp;

namespace {

// max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18, written as a minimization.
ModelSpec textbook_lp() {
  ModelSpec spec;
  const int x = spec.add_variable("x", 0.0, kInfinity);
  const int y = spec.add_variable("y", 0.0, kInfinity);
  spec.set_objective(x, -3.0);
  spec.set_objective(y, -5.0);
  spec.add_constraint({{x, 1.0}}, Relation::kLessEqual, 4.0, "a");
  spec.add_constraint({{y, 2.0}}, Relation::kLessEqual, 12.0, "b");
  spec.add_constraint({{x, 3.0}, {y, 2.0}}, Relation::kLessEqual, 18.0, "c");
  return spec;
}

ModelSpec random_bounded_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModelSpec spec;
  for (int j = 0; j < n; ++j) {
    const double lo = -2.0 + u(rng);
    spec.add_variable("v" + std::to_string(j), lo, lo + 1.0 + 3.0 * (u(rng) + 1.0));
    spec.set_objective(j, 5.0 * u(rng));
  }
  for (int r = 0; r < m; ++r) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      if (u(rng) > -0.4) terms.push_back({j, std::round(4.0 * u(rng) * 4.0) / 4.0});
    }
    const double pick = u(rng);
    const Relation rel = pick < -0.3 ? Relation::kLessEqual : (pick < 0.7 ? Relation::kGreaterEqual : Relation::kEqual);
    spec.add_constraint(terms, rel, 2.0 * u(rng));
  }
  return spec;
}

ModelSpec random_mixed_milp(std::mt19937_64& rng, int binaries, int continuous, int rows) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModelSpec spec;
  for (int j = 0; j < binaries; ++j) spec.add_binary("b" + std::to_string(j));
  for (int j = 0; j < continuous; ++j) spec.add_variable("c" + std::to_string(j), 0.0, 3.0);
  const int n = binaries + continuous;
  for (int j = 0; j < n; ++j) spec.set_objective(j, 4.0 * u(rng));
  for (int r = 0; r < rows; ++r) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      if (u(rng) > 0.0) terms.push_back({j, 3.0 * u(rng)});
    }
    spec.add_constraint(terms, u(rng) < 0.3 ? Relation::kLessEqual : Relation::kGreaterEqual, u(rng));
  }
  return spec;
}

ModelSpec with_rhs_shift(const ModelSpec& spec, int row, double delta) {
  ModelSpec out;
  for (const auto& v : spec.variables()) out.add_variable(v.name, v.lower, v.upper, v.is_binary);
  for (int j = 0; j < spec.variable_count(); ++j) out.set_objective(j, spec.objective()[j]);
  for (int k = 0; k < spec.constraint_count(); ++k) {
    const auto& c = spec.constraints()[k];
    out.add_constraint(c.terms, c.relation, c.rhs + (k == row ? delta : 0.0), c.family);
  }
  return out;
}

}  // namespace

TEST(Lp, TextbookOptimumAndDuals) {
  const auto sol = solve_lp(textbook_lp());
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, -36.0, 1e-9);
  EXPECT_NEAR(sol.values[0], 2.0, 1e-9);
  EXPECT_NEAR(sol.values[1], 6.0, 1e-9);
  ASSERT_EQ(sol.row_duals.size(), 3u);
  EXPECT_NEAR(sol.row_duals[0], 0.0, 1e-9);
  EXPECT_NEAR(sol.row_duals[1], -1.5, 1e-9);
  EXPECT_NEAR(sol.row_duals[2], -1.0, 1e-9);
}

TEST(Lp, DualsPredictRhsSensitivity) {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 30; ++trial) {
    const ModelSpec spec = random_bounded_lp(rng, 3, 3);
    const auto base = solve_lp(spec);
    if (!base.optimal()) continue;
    for (int r = 0; r < spec.constraint_count(); ++r) {
      const double delta = 1e-6;
      const auto up = solve_lp(with_rhs_shift(spec, r, delta));
      const auto down = solve_lp(with_rhs_shift(spec, r, -delta));
      if (!up.optimal() || !down.optimal()) continue;
      const double up_slope = (up.objective - base.objective) / delta;
      const double down_slope = (base.objective - down.objective) / delta;
      // Degenerate vertices have one-sided derivatives; skip them.
      if (std::abs(up_slope - down_slope) > 1e-4) continue;
      EXPECT_NEAR(base.row_duals[r], up_slope, 1e-4);
      ++checked;
    }
  }
  EXPECT_GE(checked, 10);
}

TEST(Lp, MatchesVertexEnumerationOnRandomBoundedLps) {
  std::mt19937_64 rng(1);
  int feasible = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 4;
    const ModelSpec spec = random_bounded_lp(rng, n, m);
    const auto sol = solve_lp(spec);
    const auto ref = oracle::vertex_enumeration(spec);
    ASSERT_EQ(sol.optimal(), ref.has_value()) << "trial " << trial << "\n" << to_lp_format(spec);
    if (ref) {
      ++feasible;
      EXPECT_NEAR(sol.objective, *ref, 1e-7) << "trial " << trial;
      EXPECT_LE(spec.max_violation(sol.values), 1e-7);
    } else {
      ++infeasible;
      EXPECT_EQ(sol.status, SolveStatus::kInfeasible);
    }
  }
  EXPECT_GT(feasible, 50);
  EXPECT_GT(infeasible, 5);
}

TEST(Lp, DetectsInfeasibility) {
  ModelSpec spec;
  const int x = spec.add_variable("x", 0.0, 10.0);
  spec.add_constraint({{x, 1.0}}, Relation::kGreaterEqual, 5.0);
  spec.add_constraint({{x, 1.0}}, Relation::kLessEqual, 3.0);
  EXPECT_EQ(solve_lp(spec).status, SolveStatus::kInfeasible);
}

TEST(Lp, DetectsUnboundedness) {
  ModelSpec spec;
  const int x = spec.add_variable("x", 0.0, kInfinity);
  const int y = spec.add_variable("y", -kInfinity, kInfinity);
  spec.set_objective(x, -1.0);
  spec.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::kLessEqual, 2.0);
  EXPECT_EQ(solve_lp(spec).status, SolveStatus::kUnbounded);
}

TEST(Lp, FreeVariablesAndEqualities) {
  // min |a - 3| via a - 3 = p - n, p, n >= 0.
  ModelSpec spec;
  const int a = spec.add_variable("a", -kInfinity, kInfinity);
  const int p = spec.add_variable("p", 0.0, kInfinity);
  const int n = spec.add_variable("n", 0.0, kInfinity);
  spec.set_objective(p, 1.0);
  spec.set_objective(n, 1.0);
  spec.add_constraint({{a, 1.0}, {p, -1.0}, {n, 1.0}}, Relation::kEqual, 3.0);
  spec.add_constraint({{a, 1.0}}, Relation::kLessEqual, 1.0);
  const auto sol = solve_lp(spec);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, 2.0, 1e-9);
  EXPECT_NEAR(sol.values[a], 1.0, 1e-9);
}

TEST(Lp, DegenerateCyclingExampleTerminates) {
  ModelSpec spec;
  std::vector<int> x;
  for (int j = 0; j < 4; ++j) x.push_back(spec.add_variable("x" + std::to_string(j), 0.0, kInfinity));
  spec.set_objective(x[0], -0.75);
  spec.set_objective(x[1], 20.0);
  spec.set_objective(x[2], -0.5);
  spec.set_objective(x[3], 6.0);
  spec.add_constraint({{x[0], 0.25}, {x[1], -8.0}, {x[2], -1.0}, {x[3], 9.0}}, Relation::kLessEqual, 0.0);
  spec.add_constraint({{x[0], 0.5}, {x[1], -12.0}, {x[2], -0.5}, {x[3], 3.0}}, Relation::kLessEqual, 0.0);
  spec.add_constraint({{x[2], 1.0}}, Relation::kLessEqual, 1.0);
  const auto sol = solve_lp(spec);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, -1.25, 1e-9);
}

TEST(Lp, OverriddenBounds) {
  const ModelSpec spec = textbook_lp();
  const auto sol = solve_lp(spec, {0.0, 0.0}, {1.0, kInfinity});
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, -3.0 - 30.0, 1e-9);
  EXPECT_THROW(solve_lp(spec, {0.0}, {1.0}), InputError);
}

TEST(Milp, KnapsackMatchesBruteForce) {
  ModelSpec spec;
  const double value[] = {10, 13, 7, 8, 9, 4};
  const double weight[] = {5, 7, 4, 3, 5, 2};
  std::vector<Term> cap;
  for (int j = 0; j < 6; ++j) {
    spec.add_binary("k" + std::to_string(j));
    spec.set_objective(j, -value[j]);
    cap.push_back({j, weight[j]});
  }
  spec.add_constraint(cap, Relation::kLessEqual, 13.0);
  const auto bb = solve_milp(spec);
  const auto bf = brute_force_binary(spec);
  ASSERT_TRUE(bb.optimal());
  EXPECT_NEAR(bb.objective, bf.objective, 1e-9);
  EXPECT_NEAR(bb.objective, -27.0, 1e-9);
}

TEST(Milp, RandomMixedProblemsMatchBruteForce) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const ModelSpec spec = random_mixed_milp(rng, 3 + trial % 6, trial % 3, 2 + trial % 4);
    const auto bb = solve_milp(spec);
    const auto bf = brute_force_binary(spec);
    ASSERT_EQ(bb.optimal(), bf.optimal()) << "trial " << trial;
    if (bf.optimal()) {
      EXPECT_NEAR(bb.objective, bf.objective, 1e-7) << "trial " << trial;
      EXPECT_LE(spec.max_violation(bb.values), 1e-6);
      for (int j : spec.binary_indices()) EXPECT_TRUE(bb.values[j] == 0.0 || bb.values[j] == 1.0);
    }
  }
}

TEST(Milp, SchedulingInstancesMatchScheduleEnumeration) {
  std::mt19937_64 rng(99);
  int feasible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int steps = 4 + trial % 7;
    const auto inst = oracle::random_instance(rng, steps, 1 + trial % 4);
    const auto sol = solve_milp(build_do(inst));
    const auto ref = oracle::enumerate_schedules(inst, inst.forecast.mean);
    ASSERT_EQ(sol.optimal(), ref.feasible) << "trial " << trial;
    if (ref.feasible) {
      ++feasible;
      EXPECT_NEAR(sol.objective, ref.cost, 1e-7) << "trial " << trial;
    }
  }
  EXPECT_GT(feasible, 10);
}

TEST(Milp, BruteForceRefusesLargeModels) {
  ModelSpec spec;
  for (int j = 0; j < 21; ++j) spec.add_binary("b");
  EXPECT_THROW(brute_force_binary(spec), InputError);
}

TEST(ModelSpec, ValidationAndFamilies) {
  ModelSpec spec = textbook_lp();
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.families(), (std::vector<std::string>{"a", "b", "c"}));
  const auto reduced = spec.without_family("c");
  EXPECT_EQ(reduced.constraint_count(), 2);
  EXPECT_NEAR(solve_lp(reduced).objective, -12.0 - 30.0, 1e-9);
  EXPECT_NEAR(spec.max_violation({4.0, 6.0}), 6.0, 1e-12);
  EXPECT_NEAR(spec.evaluate_objective({2.0, 6.0}), -36.0, 1e-12);

  ModelSpec bad;
  bad.add_variable("x", 1.0, 0.0);
  EXPECT_THROW(bad.validate(), InputError);
  ModelSpec bad_index;
  bad_index.add_variable("x", 0.0, 1.0);
  bad_index.add_constraint({{3, 1.0}}, Relation::kLessEqual, 1.0);
  EXPECT_THROW(bad_index.validate(), InputError);
}

TEST(LpFormat, ContainsAllSections) {
  ModelSpec spec = textbook_lp();
  spec.add_binary("z");
  const std::string text = to_lp_format(spec);
  for (const char* section : {"Minimize", "Subject To", "Bounds", "Binaries", "End"}) {
    EXPECT_NE(text.find(section), std::string::npos) << section;
  }
  EXPECT_NE(text.find("<= 18"), std::string::npos) << text;
}
