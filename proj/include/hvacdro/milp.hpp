#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace hvacdro::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Tolerances shared by every solve path.
inline constexpr double kFeasibilityTol = 1e-7;
inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kPivotTol = 1e-9;
inline constexpr double kOptimalityTol = 1e-9;

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool is_binary = false;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  /// Constraint group label, used to report which family made a model infeasible.
  std::string family;
};

/// A minimization problem over continuous and binary variables.
class ModelSpec {
 public:
  int add_variable(std::string name, double lower, double upper, bool is_binary = false);
  int add_binary(std::string name) { return add_variable(std::move(name), 0.0, 1.0, true); }
  void add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string family = {});
  void set_objective(int var, double coef);
  void add_objective(int var, double coef);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_offset() const { return objective_offset_; }
  void set_objective_offset(double offset) { objective_offset_ = offset; }

  int variable_count() const { return static_cast<int>(variables_.size()); }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  int binary_count() const;
  std::vector<int> binary_indices() const;

  /// Copy with every constraint of the given family removed.
  ModelSpec without_family(const std::string& family) const;
  std::vector<std::string> families() const;

  /// Throws InputError on bad indices, inverted bounds or non-finite data.
  void validate() const;

  /// Largest violation of any bound or constraint by `values`.
  double max_violation(const std::vector<double>& values) const;
  double evaluate_objective(const std::vector<double>& values) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
  double objective_offset_ = 0.0;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(SolveStatus status);

struct SolverStats {
  std::int64_t nodes = 0;
  std::int64_t pivots = 0;
};

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = kInfinity;
  std::vector<double> values;
  /// LP only: shadow price of each row, d(objective)/d(rhs).
  std::vector<double> row_duals;
  /// LP only: reduced cost of each variable.
  std::vector<double> reduced_costs;
  SolverStats stats;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

/// Bounded-variable primal simplex on the continuous relaxation.
Solution solve_lp(const ModelSpec& spec);

/// As solve_lp, with per-variable bounds replacing the spec's bounds.
Solution solve_lp(const ModelSpec& spec, const std::vector<double>& lower,
                  const std::vector<double>& upper);

/// Best-bound branch and bound over the binary variables.
Solution solve_milp(const ModelSpec& spec);

/// Enumerates every binary assignment. Test oracle; refuses more than 20 binaries.
Solution brute_force_binary(const ModelSpec& spec);

/// CPLEX-style LP text (Minimize / Subject To / Bounds / Binaries / End).
void write_lp_format(const ModelSpec& spec, std::ostream& out);
std::string to_lp_format(const ModelSpec& spec);

}  // namespace hvacdro::milp
