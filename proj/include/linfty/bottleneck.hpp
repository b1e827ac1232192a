#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "linfty/costs.hpp"
#include "linfty/measures.hpp"

namespace linfty {

struct BottleneckSolution {
  /// Optimal value lambda* of min over plans of the max cost on the support.
  double value = 0.0;
  Coupling plan;
  /// Position of lambda* in the ascending list of distinct edge costs.
  std::size_t threshold_index = 0;
  std::size_t distinct_costs_count = 0;
};

using EdgePredicate = std::function<bool(std::size_t i, std::size_t j)>;

struct FeasibilityResult {
  bool feasible = false;
  std::optional<Coupling> plan;
};

/// Max-flow test: can all mass move using only allowed edges?
FeasibilityResult feasibility_at_threshold(const MeasurePtr& mu,
                                           const MeasurePtr& nu,
                                           const EdgePredicate& allowed_edges);

/// Exact bottleneck solve: binary search over the sorted distinct costs with
/// a max-flow feasibility test at each probe.
BottleneckSolution solve_bottleneck(const MeasurePtr& mu, const MeasurePtr& nu,
                                    const CostFunction& c);
BottleneckSolution solve_bottleneck(const MeasurePtr& mu, const MeasurePtr& nu,
                                    const CostMatrix& costs);

/// Min over permutations of the max pair cost. Requires m = n <= 8 and equal
/// weights (throws std::invalid_argument otherwise).
double brute_force_bottleneck(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const CostFunction& c);
double brute_force_bottleneck(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const CostMatrix& costs);

/// Edges (i, j) with cost <= lambda, in row-major order.
std::vector<std::pair<std::size_t, std::size_t>> threshold_edges(
    const CostMatrix& costs, double lambda);

/// Largest cost over the support of a plan (C_infinity of the plan).
double plan_max_cost(const Coupling& plan, const CostFunction& c);

}  // namespace linfty
