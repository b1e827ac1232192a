#include "linfty/bottleneck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "linfty/flow.hpp"

namespace linfty {

FeasibilityResult feasibility_at_threshold(const MeasurePtr& mu,
                                           const MeasurePtr& nu,
                                           const EdgePredicate& allowed_edges) {
  const std::size_t m = mu->size();
  const std::size_t n = nu->size();
  const auto supply = flow::integerize_weights(mu->weights());
  const auto demand = flow::integerize_weights(nu->weights());
  const flow::Capacity total =
      std::min(std::accumulate(supply.begin(), supply.end(), flow::Capacity{0}),
               std::accumulate(demand.begin(), demand.end(), flow::Capacity{0}));

  const std::size_t source = 0;
  const std::size_t sink = m + n + 1;
  flow::MaxFlowGraph graph(m + n + 2);
  for (std::size_t i = 0; i < m; ++i) graph.add_arc(source, 1 + i, supply[i]);
  struct Edge {
    std::size_t i, j, arc;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (allowed_edges(i, j)) {
        edges.push_back(
            {i, j, graph.add_arc(1 + i, 1 + m + j, std::min(supply[i], demand[j]))});
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) graph.add_arc(1 + m + j, sink, demand[j]);

  FeasibilityResult result;
  result.feasible = graph.max_flow(source, sink) == total;
  if (result.feasible) {
    std::vector<CouplingEntry> entries;
    for (const auto& e : edges) {
      if (const auto units = graph.flow(e.arc); units > 0) {
        entries.push_back({e.i, e.j, flow::deintegerize(units)});
      }
    }
    result.plan.emplace(mu, nu, std::move(entries));
  }
  return result;
}

BottleneckSolution solve_bottleneck(const MeasurePtr& mu, const MeasurePtr& nu,
                                    const CostFunction& c) {
  return solve_bottleneck(mu, nu, compute_cost_matrix(*mu, *nu, c));
}

BottleneckSolution solve_bottleneck(const MeasurePtr& mu, const MeasurePtr& nu,
                                    const CostMatrix& costs) {
  if (costs.rows != mu->size() || costs.cols != nu->size()) {
    throw std::invalid_argument("cost matrix shape does not match measures");
  }
  std::vector<double> distinct = costs.values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  auto probe = [&](std::size_t k) {
    const double lambda = distinct[k];
    return feasibility_at_threshold(
        mu, nu, [&](std::size_t i, std::size_t j) { return costs(i, j) <= lambda; });
  };

  FeasibilityResult at_top = probe(distinct.size() - 1);
  if (!at_top.feasible) {
    throw std::runtime_error(
        "bottleneck infeasible with every edge allowed (weight integerization drift)");
  }
  // Smallest feasible index; feasibility is monotone in the threshold.
  std::size_t lo = 0;
  std::size_t hi = distinct.size() - 1;
  FeasibilityResult best = std::move(at_top);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    FeasibilityResult r = probe(mid);
    if (r.feasible) {
      hi = mid;
      best = std::move(r);
    } else {
      lo = mid + 1;
    }
  }
  if (!best.plan || lo != hi) throw std::logic_error("bottleneck search lost its plan");
  return BottleneckSolution{distinct[lo], std::move(*best.plan), lo, distinct.size()};
}

double brute_force_bottleneck(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const CostFunction& c) {
  return brute_force_bottleneck(mu, nu, compute_cost_matrix(mu, nu, c));
}

double brute_force_bottleneck(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu, const CostMatrix& costs) {
  const std::size_t n = mu.size();
  if (nu.size() != n) throw std::invalid_argument("brute force needs m = n");
  if (n > 8) throw std::invalid_argument("brute force limited to n <= 8");
  for (const auto* m : {&mu, &nu}) {
    for (double w : m->weights()) {
      if (std::abs(w - m->weight(0)) > 1e-12) {
        throw std::invalid_argument("brute force needs equal weights");
      }
    }
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < n && worst < best; ++i) {
      worst = std::max(worst, costs(i, perm[i]));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<std::pair<std::size_t, std::size_t>> threshold_edges(
    const CostMatrix& costs, double lambda) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < costs.rows; ++i) {
    for (std::size_t j = 0; j < costs.cols; ++j) {
      if (costs(i, j) <= lambda) edges.emplace_back(i, j);
    }
  }
  return edges;
}

double plan_max_cost(const Coupling& plan, const CostFunction& c) {
  double worst = 0.0;
  for (const auto& e : plan.entries()) {
    worst = std::max(worst, c(plan.source().point(e.i).coords(),
                              plan.target().point(e.j).coords()));
  }
  return worst;
}

}  // namespace linfty
