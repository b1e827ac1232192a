#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace linfty::flow {

using Capacity = std::int64_t;

/// Dinic max-flow with capacity scaling. Arcs are explored in insertion
/// order, so results are deterministic.
class MaxFlowGraph {
 public:
  explicit MaxFlowGraph(std::size_t nodes);

  /// Returns the arc id (usable with flow()).
  std::size_t add_arc(std::size_t from, std::size_t to, Capacity capacity);
  Capacity max_flow(std::size_t source, std::size_t sink);
  Capacity flow(std::size_t arc) const { return arcs_[arc].flow; }
  std::size_t node_count() const { return adjacency_.size(); }

 private:
  struct Arc {
    std::size_t to;
    Capacity capacity;
    Capacity flow;
  };

  Capacity residual(std::size_t a) const { return arcs_[a].capacity - arcs_[a].flow; }
  bool build_levels(std::size_t source, std::size_t sink, Capacity threshold);
  Capacity push(std::size_t v, std::size_t sink, Capacity limit, Capacity threshold);

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

/// Successive shortest paths with Dijkstra on reduced costs. Costs are
/// nonnegative long doubles (extended exponent range for c^p with large p).
class MinCostFlowGraph {
 public:
  using Cost = long double;

  explicit MinCostFlowGraph(std::size_t nodes);

  std::size_t add_arc(std::size_t from, std::size_t to, Capacity capacity, Cost cost);
  /// Sends up to `limit` units from source to sink at minimum cost; returns
  /// the amount sent.
  Capacity min_cost_flow(std::size_t source, std::size_t sink, Capacity limit);
  Capacity flow(std::size_t arc) const { return arcs_[arc].flow; }

 private:
  struct Arc {
    std::size_t to;
    Capacity capacity;
    Capacity flow;
    Cost cost;
  };

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Exact integer capacities for real weights: w * 2^62, rounded. Weights are
/// doubles, so every weight >= 2^-9 maps without rounding error.
inline constexpr int kWeightScaleExponent = 62;
std::vector<Capacity> integerize_weights(std::span<const double> weights);
double deintegerize(Capacity units);

}  // namespace linfty::flow
