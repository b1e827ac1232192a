#pragma once

#include <cstddef>
#include <vector>

#include "linfty/costs.hpp"
#include "linfty/measures.hpp"

namespace linfty {

/// Arc insertion order of the min-cost flow network. Ties between equally
/// cheap augmenting paths are broken by this order.
enum class ArcOrder { kForward, kReversed };

struct PSolveOptions {
  ArcOrder arc_order = ArcOrder::kForward;
  /// Pairwise-exchange refinement after the flow solve (see solve_p).
  bool refine = true;
};

struct PSolution {
  double p = 1.0;
  /// C_p of the plan, (sum mass * c^p)^(1/p), in cost units.
  double value = 0.0;
  Coupling plan;
  std::size_t refinement_swaps = 0;
};

struct PSchedule {
  std::vector<double> exponents;
  std::vector<PSolution> solutions;
  Coupling terminal_plan;
  double bottleneck_value = 0.0;
  /// Values nondecreasing in p within kScheduleSlack.
  bool values_nondecreasing = true;
  /// Every value <= bottleneck_value + kBoundSlack.
  bool values_bounded = true;
};

inline constexpr double kMaxExponent = 1024.0;
inline constexpr double kScheduleSlack = 1e-9;
inline constexpr double kBoundSlack = 1e-6;

/// 1, 2, 4, ..., 256.
std::vector<double> default_p_schedule();

/// Minimizes sum mass * (c / c_max)^p by successive shortest paths on the
/// integerized weights, with extended-precision normalized arc costs; then
/// applies two-pair exchanges (i,j),(k,l) -> (i,l),(k,j) while they strictly
/// lower the exact p-objective. Throws std::invalid_argument for p < 1 and
/// std::domain_error for p > kMaxExponent.
PSolution solve_p(const MeasurePtr& mu, const MeasurePtr& nu,
                  const CostFunction& c, double p, const PSolveOptions& options = {});
PSolution solve_p(const MeasurePtr& mu, const MeasurePtr& nu,
                  const CostMatrix& costs, double p, const PSolveOptions& options = {});

/// Solves every exponent of an increasing schedule (first >= 1); the plan at
/// the largest p is the terminal plan.
PSchedule run_p_schedule(const MeasurePtr& mu, const MeasurePtr& nu,
                         const CostFunction& c, const std::vector<double>& p_list,
                         double bottleneck_value, const PSolveOptions& options = {});

/// C_p of a given plan.
double plan_p_cost(const Coupling& plan, const CostFunction& c, double p);

}  // namespace linfty
