#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "hvacdro/errors.hpp"
#include "hvacdro/milp.hpp"

namespace hvacdro::milp {

namespace {

struct Node {
  double bound = 0.0;
  std::int64_t id = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> values;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

bool has_continuous(const ModelSpec& spec) {
  return std::any_of(spec.variables().begin(), spec.variables().end(),
                     [](const Variable& v) { return !v.is_binary; });
}

/// Most fractional binary, lowest index on ties; -1 when integral.
int branching_variable(const std::vector<int>& binaries, const std::vector<double>& values) {
  int best = -1;
  double best_distance = 0.0;
  for (int j : binaries) {
    const double frac = values[j] - std::floor(values[j]);
    const double distance_to_integer = std::min(frac, 1.0 - frac);
    if (distance_to_integer <= kIntegralityTol) continue;
    if (best < 0 || distance_to_integer > best_distance) {
      best = j;
      best_distance = distance_to_integer;
    }
  }
  return best;
}

/// Fixes the binaries at `rounded` and recovers an exactly feasible point.
bool polish_integral(const ModelSpec& spec, const std::vector<int>& binaries,
                     std::vector<double> rounded, Solution& out, SolverStats& stats) {
  if (!has_continuous(spec)) {
    if (spec.max_violation(rounded) > kFeasibilityTol) return false;
    out.values = std::move(rounded);
    out.objective = spec.evaluate_objective(out.values);
    return true;
  }
  std::vector<double> lower;
  std::vector<double> upper;
  for (const auto& v : spec.variables()) {
    lower.push_back(v.lower);
    upper.push_back(v.upper);
  }
  for (int j : binaries) lower[j] = upper[j] = rounded[j];
  Solution fixed = solve_lp(spec, lower, upper);
  stats.pivots += fixed.stats.pivots;
  ++stats.nodes;
  if (!fixed.optimal()) return false;
  out.values = std::move(fixed.values);
  for (int j : binaries) out.values[j] = rounded[j];
  out.objective = fixed.objective;
  return true;
}

}  // namespace

Solution solve_milp(const ModelSpec& spec) {
  spec.validate();
  const std::vector<int> binaries = spec.binary_indices();

  Solution best;
  best.status = SolveStatus::kInfeasible;
  SolverStats stats;
  std::int64_t next_id = 0;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

  auto prune_level = [&]() {
    return best.optimal() ? best.objective - 1e-9 * std::max(1.0, std::abs(best.objective))
                          : kInfinity;
  };

  // Returns false when the relaxation is unbounded.
  auto evaluate = [&](std::vector<double> lower, std::vector<double> upper) -> bool {
    Solution lp = solve_lp(spec, lower, upper);
    ++stats.nodes;
    stats.pivots += lp.stats.pivots;
    if (lp.status == SolveStatus::kUnbounded) return false;
    if (!lp.optimal() || lp.objective >= prune_level()) return true;
    if (branching_variable(binaries, lp.values) < 0) {
      std::vector<double> rounded = lp.values;
      for (int j : binaries) rounded[j] = std::round(rounded[j]);
      Solution candidate;
      if (polish_integral(spec, binaries, std::move(rounded), candidate, stats) &&
          candidate.objective < prune_level()) {
        candidate.status = SolveStatus::kOptimal;
        best = std::move(candidate);
      }
      return true;
    }
    open.push(Node{lp.objective, next_id++, std::move(lower), std::move(upper), std::move(lp.values)});
    return true;
  };

  std::vector<double> root_lower;
  std::vector<double> root_upper;
  for (const auto& v : spec.variables()) {
    root_lower.push_back(v.lower);
    root_upper.push_back(v.upper);
  }
  if (!evaluate(root_lower, root_upper)) {
    Solution unbounded;
    unbounded.status = SolveStatus::kUnbounded;
    unbounded.stats = stats;
    return unbounded;
  }

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= prune_level()) break;
    const int j = branching_variable(binaries, node.values);
    std::vector<double> down_upper = node.upper;
    down_upper[j] = 0.0;
    evaluate(node.lower, std::move(down_upper));
    std::vector<double> up_lower = node.lower;
    up_lower[j] = 1.0;
    evaluate(std::move(up_lower), node.upper);
  }

  best.stats = stats;
  return best;
}

Solution brute_force_binary(const ModelSpec& spec) {
  spec.validate();
  const std::vector<int> binaries = spec.binary_indices();
  if (binaries.size() > 20) {
    throw InputError("brute_force_binary: more than 20 binary variables (" +
                     std::to_string(binaries.size()) + ")");
  }
  Solution best;
  best.status = SolveStatus::kInfeasible;
  SolverStats stats;
  const std::uint64_t combos = std::uint64_t{1} << binaries.size();
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    std::vector<double> assignment(spec.variable_count(), 0.0);
    for (std::size_t b = 0; b < binaries.size(); ++b) {
      assignment[binaries[b]] = static_cast<double>((mask >> b) & 1U);
    }
    Solution candidate;
    if (!polish_integral(spec, binaries, std::move(assignment), candidate, stats)) {
      ++stats.nodes;
      continue;
    }
    if (!best.optimal() || candidate.objective < best.objective - 1e-12) {
      candidate.status = SolveStatus::kOptimal;
      best = std::move(candidate);
    }
  }
  best.stats = stats;
  return best;
}

}  // namespace hvacdro::milp
