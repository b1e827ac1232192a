#include "linfty/pnorm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "linfty/flow.hpp"

namespace linfty {
namespace {

using flow::Capacity;
using Power = long double;

void check_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("exponent p must be >= 1");
  if (p > kMaxExponent) {
    throw std::domain_error("exponent p above the normalization cap");
  }
}

// (sum_k mass_k * c_k^p)^(1/p), scaled by the largest cost to avoid underflow.
double power_mean(const std::vector<double>& masses,
                  const std::vector<double>& costs, double p) {
  const double top = costs.empty() ? 0.0 : *std::max_element(costs.begin(), costs.end());
  if (top == 0.0) return 0.0;
  Power sum = 0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    sum += static_cast<Power>(masses[k]) *
           std::pow(static_cast<Power>(costs[k] / top), static_cast<Power>(p));
  }
  return top * static_cast<double>(std::pow(sum, 1.0L / static_cast<Power>(p)));
}

// Two-pair exchanges that strictly lower sum units * weight.
std::size_t refine_by_exchanges(std::vector<Capacity>& units,
                                const std::vector<Power>& weight,
                                std::size_t rows, std::size_t cols) {
  constexpr Power kRelative = 1e-15L;
  std::size_t swaps = 0;
  for (int pass = 0; pass < 100000; ++pass) {
    std::vector<std::size_t> support;
    for (std::size_t k = 0; k < units.size(); ++k) {
      if (units[k] > 0) support.push_back(k);
    }
    bool improved = false;
    for (std::size_t a = 0; a < support.size(); ++a) {
      for (std::size_t b = a + 1; b < support.size(); ++b) {
        const std::size_t ea = support[a];
        const std::size_t eb = support[b];
        if (units[ea] == 0 || units[eb] == 0) continue;
        const std::size_t i = ea / cols, j = ea % cols;
        const std::size_t k = eb / cols, l = eb % cols;
        if (i == k || j == l) continue;
        const Power before = weight[ea] + weight[eb];
        const Power after = weight[i * cols + l] + weight[k * cols + j];
        if (after < before * (1 - kRelative)) {
          const Capacity moved = std::min(units[ea], units[eb]);
          units[ea] -= moved;
          units[eb] -= moved;
          units[i * cols + l] += moved;
          units[k * cols + j] += moved;
          improved = true;
          ++swaps;
        }
      }
    }
    if (!improved) break;
  }
  (void)rows;
  return swaps;
}

}  // namespace

std::vector<double> default_p_schedule() {
  std::vector<double> ps;
  for (double p = 1.0; p <= 256.0; p *= 2.0) ps.push_back(p);
  return ps;
}

PSolution solve_p(const MeasurePtr& mu, const MeasurePtr& nu,
                  const CostFunction& c, double p, const PSolveOptions& options) {
  check_exponent(p);
  return solve_p(mu, nu, compute_cost_matrix(*mu, *nu, c), p, options);
}

PSolution solve_p(const MeasurePtr& mu, const MeasurePtr& nu,
                  const CostMatrix& costs, double p, const PSolveOptions& options) {
  check_exponent(p);
  const std::size_t m = mu->size();
  const std::size_t n = nu->size();
  if (costs.rows != m || costs.cols != n) {
    throw std::invalid_argument("cost matrix shape does not match measures");
  }
  const double c_max = *std::max_element(costs.values.begin(), costs.values.end());
  std::vector<Power> weight(m * n, 0);
  if (c_max > 0.0) {
    for (std::size_t k = 0; k < m * n; ++k) {
      weight[k] = std::pow(static_cast<Power>(costs.values[k] / c_max),
                           static_cast<Power>(p));
    }
  }

  const auto supply = flow::integerize_weights(mu->weights());
  const auto demand = flow::integerize_weights(nu->weights());
  const Capacity total =
      std::min(std::accumulate(supply.begin(), supply.end(), Capacity{0}),
               std::accumulate(demand.begin(), demand.end(), Capacity{0}));

  const std::size_t source = 0;
  const std::size_t sink = m + n + 1;
  flow::MinCostFlowGraph graph(m + n + 2);
  std::vector<std::size_t> arc_of(m * n);
  auto add_row = [&](std::size_t i) {
    graph.add_arc(source, 1 + i, supply[i], 0);
  };
  auto add_middle = [&](std::size_t i, std::size_t j) {
    arc_of[i * n + j] = graph.add_arc(1 + i, 1 + m + j,
                                      std::min(supply[i], demand[j]), weight[i * n + j]);
  };
  auto add_column = [&](std::size_t j) {
    graph.add_arc(1 + m + j, sink, demand[j], 0);
  };
  if (options.arc_order == ArcOrder::kForward) {
    for (std::size_t i = 0; i < m; ++i) add_row(i);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) add_middle(i, j);
    for (std::size_t j = 0; j < n; ++j) add_column(j);
  } else {
    for (std::size_t i = m; i-- > 0;) add_row(i);
    for (std::size_t i = m; i-- > 0;)
      for (std::size_t j = n; j-- > 0;) add_middle(i, j);
    for (std::size_t j = n; j-- > 0;) add_column(j);
  }
  if (graph.min_cost_flow(source, sink, total) != total) {
    throw std::logic_error("min-cost flow failed to route all mass");
  }

  std::vector<Capacity> units(m * n);
  for (std::size_t k = 0; k < m * n; ++k) units[k] = graph.flow(arc_of[k]);
  std::size_t swaps = 0;
  if (options.refine) swaps = refine_by_exchanges(units, weight, m, n);

  std::vector<CouplingEntry> entries;
  std::vector<double> masses;
  std::vector<double> entry_costs;
  for (std::size_t k = 0; k < m * n; ++k) {
    if (units[k] <= 0) continue;
    entries.push_back({k / n, k % n, flow::deintegerize(units[k])});
    masses.push_back(entries.back().mass);
    entry_costs.push_back(costs.values[k]);
  }
  const double value = power_mean(masses, entry_costs, p);
  return PSolution{p, value, Coupling(mu, nu, std::move(entries)), swaps};
}

PSchedule run_p_schedule(const MeasurePtr& mu, const MeasurePtr& nu,
                         const CostFunction& c, const std::vector<double>& p_list,
                         double bottleneck_value, const PSolveOptions& options) {
  if (p_list.empty()) throw std::invalid_argument("empty p schedule");
  if (!(p_list.front() >= 1.0)) throw std::invalid_argument("schedule must start at p >= 1");
  for (std::size_t k = 1; k < p_list.size(); ++k) {
    if (!(p_list[k] > p_list[k - 1])) {
      throw std::invalid_argument("p schedule must be increasing");
    }
  }
  const CostMatrix costs = compute_cost_matrix(*mu, *nu, c);
  std::vector<PSolution> solutions;
  solutions.reserve(p_list.size());
  for (double p : p_list) solutions.push_back(solve_p(mu, nu, costs, p, options));

  bool nondecreasing = true;
  bool bounded = true;
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    if (k > 0 && solutions[k].value < solutions[k - 1].value - kScheduleSlack) {
      nondecreasing = false;
    }
    if (solutions[k].value > bottleneck_value + kBoundSlack) bounded = false;
  }
  Coupling terminal = solutions.back().plan;
  return PSchedule{p_list,  std::move(solutions), std::move(terminal),
                   bottleneck_value, nondecreasing, bounded};
}

double plan_p_cost(const Coupling& plan, const CostFunction& c, double p) {
  check_exponent(p);
  std::vector<double> masses;
  std::vector<double> costs;
  for (const auto& e : plan.entries()) {
    masses.push_back(e.mass);
    costs.push_back(c(plan.source().point(e.i).coords(),
                      plan.target().point(e.j).coords()));
  }
  return power_mean(masses, costs, p);
}

}  // namespace linfty
