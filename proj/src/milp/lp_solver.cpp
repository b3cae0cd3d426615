// Bounded-variable primal simplex on a condensed (nonbasic-column) tableau.
//
// Every row k gets a logical variable r_k = a_k . x whose bounds encode the
// relation, so the system is A x - r = 0 with all structure in the bounds.
// The tableau D holds x_B = D x_N. Phase 1 minimizes the sum of bound
// infeasibilities of the basic variables; phase 2 the objective. Pricing is
// Dantzig's rule and falls back to Bland's rule after a run of degenerate
// pivots, which guarantees termination.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hvacdro/errors.hpp"
#include "hvacdro/milp.hpp"

namespace hvacdro::milp {

namespace {

constexpr int kDegenerateRunBeforeBland = 50;
constexpr double kDegenerateStep = 1e-12;
constexpr int kRefreshInterval = 64;

class BoundedSimplex {
 public:
  BoundedSimplex(const ModelSpec& spec, const std::vector<double>& lower,
                 const std::vector<double>& upper)
      : rows_(spec.constraint_count()), cols_(spec.variable_count()) {
    const int total = rows_ + cols_;
    lo_.resize(total);
    up_.resize(total);
    cost_.assign(total, 0.0);
    for (int j = 0; j < cols_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
      cost_[j] = spec.objective()[j];
    }
    tableau_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
    for (int k = 0; k < rows_; ++k) {
      const auto& c = spec.constraints()[k];
      for (const auto& term : c.terms) at(k, term.var) += term.coef;
      const int logical = cols_ + k;
      lo_[logical] = c.relation == Relation::kLessEqual ? -kInfinity : c.rhs;
      up_[logical] = c.relation == Relation::kGreaterEqual ? kInfinity : c.rhs;
    }
    basic_.resize(rows_);
    nonbasic_.resize(cols_);
    nonbasic_value_.resize(cols_);
    basic_value_.assign(rows_, 0.0);
    for (int k = 0; k < rows_; ++k) basic_[k] = cols_ + k;
    for (int j = 0; j < cols_; ++j) {
      nonbasic_[j] = j;
      if (std::isfinite(lo_[j])) {
        nonbasic_value_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        nonbasic_value_[j] = up_[j];
      } else {
        nonbasic_value_[j] = 0.0;
      }
    }
  }

  Solution run() {
    Solution sol;
    for (int j = 0; j < cols_; ++j) {
      if (lo_[j] > up_[j]) {
        sol.status = SolveStatus::kInfeasible;
        return sol;
      }
    }
    const std::int64_t max_iterations = 20000 + 50LL * (rows_ + cols_);
    std::vector<double> basic_cost(rows_);
    std::vector<double> reduced(cols_);
    int degenerate_run = 0;
    int since_refresh = kRefreshInterval;
    bool reduced_valid = false;

    for (std::int64_t iter = 0;; ++iter) {
      if (iter > max_iterations) {
        throw std::runtime_error("simplex: iteration limit reached");
      }
      const bool fresh = since_refresh >= kRefreshInterval;
      if (fresh) {
        recompute_basic_values();
        since_refresh = 0;
        reduced_valid = false;
      }
      ++since_refresh;

      bool phase_one = false;
      for (int i = 0; i < rows_; ++i) {
        const int v = basic_[i];
        const double x = basic_value_[i];
        if (x > up_[v] + kFeasibilityTol) {
          basic_cost[i] = 1.0;
          phase_one = true;
        } else if (x < lo_[v] - kFeasibilityTol) {
          basic_cost[i] = -1.0;
          phase_one = true;
        } else {
          basic_cost[i] = 0.0;
        }
      }
      if (phase_one || !reduced_valid) {
        if (!phase_one) {
          for (int i = 0; i < rows_; ++i) basic_cost[i] = cost_[basic_[i]];
        }
        for (int j = 0; j < cols_; ++j) reduced[j] = phase_one ? 0.0 : cost_[nonbasic_[j]];
        for (int i = 0; i < rows_; ++i) {
          const double cb = basic_cost[i];
          if (cb == 0.0) continue;
          const double* row = &at(i, 0);
          for (int j = 0; j < cols_; ++j) reduced[j] += cb * row[j];
        }
        reduced_valid = !phase_one;
      }

      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      int entering = -1;
      int direction = 0;
      double best_score = 0.0;
      for (int j = 0; j < cols_; ++j) {
        const int v = nonbasic_[j];
        const double xn = nonbasic_value_[j];
        const double d = reduced[j];
        int dir = 0;
        if (d < -kOptimalityTol && xn < up_[v]) {
          dir = 1;
        } else if (d > kOptimalityTol && xn > lo_[v]) {
          dir = -1;
        }
        if (dir == 0) continue;
        if (bland) {
          if (entering < 0 || v < nonbasic_[entering]) {
            entering = j;
            direction = dir;
          }
        } else {
          const double score = std::abs(d);
          if (score > best_score || (score == best_score && v < nonbasic_[entering])) {
            best_score = score;
            entering = j;
            direction = dir;
          }
        }
      }

      if (entering < 0) {
        if (!fresh) {
          // Confirm the verdict on freshly computed values.
          since_refresh = kRefreshInterval;
          continue;
        }
        if (phase_one) {
          sol.status = SolveStatus::kInfeasible;
          sol.stats.pivots = pivots_;
          return sol;
        }
        finish(sol, reduced);
        return sol;
      }

      // Ratio test.
      const int entering_var = nonbasic_[entering];
      double step = kInfinity;
      int leaving_row = -1;
      double leaving_target = 0.0;
      double leaving_alpha = 0.0;
      if (std::isfinite(lo_[entering_var]) && std::isfinite(up_[entering_var])) {
        step = up_[entering_var] - lo_[entering_var];
      }
      for (int i = 0; i < rows_; ++i) {
        const double alpha = direction * at(i, entering);
        if (std::abs(alpha) <= kPivotTol) continue;
        const int v = basic_[i];
        const double x = basic_value_[i];
        double limit = kInfinity;
        double target = 0.0;
        if (phase_one && x < lo_[v] - kFeasibilityTol) {
          if (alpha <= 0.0) continue;
          limit = (lo_[v] - x) / alpha;
          target = lo_[v];
        } else if (phase_one && x > up_[v] + kFeasibilityTol) {
          if (alpha >= 0.0) continue;
          limit = (up_[v] - x) / alpha;
          target = up_[v];
        } else if (alpha > 0.0) {
          if (!std::isfinite(up_[v])) continue;
          limit = std::max(0.0, (up_[v] - x) / alpha);
          target = up_[v];
        } else {
          if (!std::isfinite(lo_[v])) continue;
          limit = std::max(0.0, (lo_[v] - x) / alpha);
          target = lo_[v];
        }
        bool take = false;
        if (limit < step - kDegenerateStep) {
          take = true;
        } else if (leaving_row >= 0 && limit <= step + kDegenerateStep) {
          take = bland ? v < basic_[leaving_row] : std::abs(alpha) > std::abs(leaving_alpha);
        }
        if (take) {
          step = std::min(step, limit);
          leaving_row = i;
          leaving_target = target;
          leaving_alpha = alpha;
        }
      }

      if (!std::isfinite(step)) {
        if (phase_one) throw std::logic_error("simplex: unbounded phase-1 ray");
        sol.status = SolveStatus::kUnbounded;
        sol.stats.pivots = pivots_;
        return sol;
      }

      degenerate_run = step <= kDegenerateStep ? degenerate_run + 1 : 0;
      ++pivots_;
      const double delta = direction * step;
      if (delta != 0.0) {
        for (int i = 0; i < rows_; ++i) basic_value_[i] += delta * at(i, entering);
      }
      if (leaving_row < 0) {
        nonbasic_value_[entering] = direction > 0 ? up_[entering_var] : lo_[entering_var];
        continue;
      }
      const double entering_value = nonbasic_value_[entering] + delta;
      pivot(leaving_row, entering, reduced_valid ? &reduced : nullptr);
      basic_value_[leaving_row] = entering_value;
      nonbasic_value_[entering] = leaving_target;
    }
  }

 private:
  double& at(int row, int col) { return tableau_[static_cast<std::size_t>(row) * cols_ + col]; }

  void recompute_basic_values() {
    for (int i = 0; i < rows_; ++i) {
      const double* row = &at(i, 0);
      double acc = 0.0;
      for (int j = 0; j < cols_; ++j) {
        if (nonbasic_value_[j] != 0.0) acc += row[j] * nonbasic_value_[j];
      }
      basic_value_[i] = acc;
    }
  }

  void pivot(int r, int j, std::vector<double>* reduced) {
    double* pivot_row = &at(r, 0);
    const double inv = 1.0 / pivot_row[j];
    for (int k = 0; k < cols_; ++k) pivot_row[k] *= -inv;
    pivot_row[j] = inv;
    if (reduced) {
      auto& d = *reduced;
      const double dj = d[j];
      for (int k = 0; k < cols_; ++k) d[k] += dj * pivot_row[k];
      d[j] = dj * inv;
    }
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* row = &at(i, 0);
      const double f = row[j];
      if (f == 0.0) continue;
      for (int k = 0; k < cols_; ++k) row[k] += f * pivot_row[k];
      row[j] = f * inv;
    }
    std::swap(basic_[r], nonbasic_[j]);
  }

  void finish(Solution& sol, const std::vector<double>& reduced) {
    sol.status = SolveStatus::kOptimal;
    sol.values.assign(cols_, 0.0);
    sol.row_duals.assign(rows_, 0.0);
    sol.reduced_costs.assign(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) {
      const int v = nonbasic_[j];
      if (v < cols_) {
        sol.values[v] = nonbasic_value_[j];
        sol.reduced_costs[v] = reduced[j];
      } else {
        sol.row_duals[v - cols_] = reduced[j];
      }
    }
    for (int i = 0; i < rows_; ++i) {
      const int v = basic_[i];
      if (v < cols_) sol.values[v] = basic_value_[i];
    }
    double objective = 0.0;
    for (int j = 0; j < cols_; ++j) objective += cost_[j] * sol.values[j];
    sol.objective = objective;
    sol.stats.pivots = pivots_;
  }

  int rows_;
  int cols_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;
  std::vector<double> tableau_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  std::vector<double> nonbasic_value_;
  std::vector<double> basic_value_;
  std::int64_t pivots_ = 0;
};

}  // namespace

Solution solve_lp(const ModelSpec& spec, const std::vector<double>& lower,
                  const std::vector<double>& upper) {
  if (lower.size() != static_cast<std::size_t>(spec.variable_count()) ||
      upper.size() != lower.size()) {
    throw InputError("solve_lp: bound vectors must match the variable count");
  }
  BoundedSimplex simplex(spec, lower, upper);
  Solution sol = simplex.run();
  if (sol.optimal()) sol.objective += spec.objective_offset();
  return sol;
}

Solution solve_lp(const ModelSpec& spec) {
  spec.validate();
  std::vector<double> lower;
  std::vector<double> upper;
  for (const auto& v : spec.variables()) {
    lower.push_back(v.lower);
    upper.push_back(v.upper);
  }
  return solve_lp(spec, lower, upper);
}

}  // namespace hvacdro::milp
