#include "linfty/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace linfty::flow {
namespace {
constexpr Capacity kInfinite = std::numeric_limits<Capacity>::max();
}  // namespace

MaxFlowGraph::MaxFlowGraph(std::size_t nodes)
    : adjacency_(nodes), level_(nodes), cursor_(nodes) {}

std::size_t MaxFlowGraph::add_arc(std::size_t from, std::size_t to,
                                  Capacity capacity) {
  if (from >= adjacency_.size() || to >= adjacency_.size()) {
    throw std::out_of_range("arc endpoint out of range");
  }
  if (capacity < 0) throw std::invalid_argument("negative capacity");
  const std::size_t id = arcs_.size();
  arcs_.push_back({to, capacity, 0});
  arcs_.push_back({from, 0, 0});
  adjacency_[from].push_back(id);
  adjacency_[to].push_back(id + 1);
  return id;
}

bool MaxFlowGraph::build_levels(std::size_t source, std::size_t sink,
                                Capacity threshold) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<std::size_t> queue;
  level_[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    for (std::size_t a : adjacency_[v]) {
      const std::size_t w = arcs_[a].to;
      if (level_[w] < 0 && residual(a) >= threshold) {
        level_[w] = level_[v] + 1;
        queue.push(w);
      }
    }
  }
  return level_[sink] >= 0;
}

Capacity MaxFlowGraph::push(std::size_t v, std::size_t sink, Capacity limit,
                            Capacity threshold) {
  if (v == sink) return limit;
  for (std::size_t& k = cursor_[v]; k < adjacency_[v].size(); ++k) {
    const std::size_t a = adjacency_[v][k];
    const std::size_t w = arcs_[a].to;
    if (level_[w] != level_[v] + 1 || residual(a) < threshold) continue;
    const Capacity pushed = push(w, sink, std::min(limit, residual(a)), threshold);
    if (pushed > 0) {
      arcs_[a].flow += pushed;
      arcs_[a ^ 1].flow -= pushed;
      return pushed;
    }
  }
  return 0;
}

Capacity MaxFlowGraph::max_flow(std::size_t source, std::size_t sink) {
  if (source == sink) throw std::invalid_argument("source equals sink");
  Capacity largest = 0;
  for (std::size_t a = 0; a < arcs_.size(); a += 2) {
    largest = std::max(largest, arcs_[a].capacity);
  }
  Capacity threshold = 1;
  while (threshold <= largest / 2) threshold *= 2;

  Capacity total = 0;
  for (; threshold >= 1; threshold /= 2) {
    while (build_levels(source, sink, threshold)) {
      std::fill(cursor_.begin(), cursor_.end(), 0);
      while (const Capacity f = push(source, sink, kInfinite, threshold)) {
        total += f;
      }
    }
  }
  return total;
}

MinCostFlowGraph::MinCostFlowGraph(std::size_t nodes) : adjacency_(nodes) {}

std::size_t MinCostFlowGraph::add_arc(std::size_t from, std::size_t to,
                                      Capacity capacity, Cost cost) {
  if (from >= adjacency_.size() || to >= adjacency_.size()) {
    throw std::out_of_range("arc endpoint out of range");
  }
  if (capacity < 0) throw std::invalid_argument("negative capacity");
  if (!(cost >= 0)) throw std::invalid_argument("arc costs must be nonnegative");
  const std::size_t id = arcs_.size();
  arcs_.push_back({to, capacity, 0, cost});
  arcs_.push_back({from, 0, 0, -cost});
  adjacency_[from].push_back(id);
  adjacency_[to].push_back(id + 1);
  return id;
}

Capacity MinCostFlowGraph::min_cost_flow(std::size_t source, std::size_t sink,
                                         Capacity limit) {
  const std::size_t n = adjacency_.size();
  const Cost inf = std::numeric_limits<Cost>::infinity();
  std::vector<Cost> potential(n, 0);
  std::vector<Cost> dist(n);
  std::vector<std::size_t> via(n);
  std::vector<char> done(n);

  Capacity sent = 0;
  while (sent < limit) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    dist[source] = 0;
    // Dense Dijkstra: graphs here are complete bipartite, so an O(V^2)
    // selection beats a heap. Ties go to the lowest node index.
    while (true) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && dist[v] < inf && (u == n || dist[v] < dist[u])) u = v;
      }
      if (u == n) break;
      done[u] = 1;
      if (u == sink) break;
      for (std::size_t a : adjacency_[u]) {
        const Arc& arc = arcs_[a];
        if (arc.capacity - arc.flow <= 0 || done[arc.to]) continue;
        Cost reduced = arc.cost + potential[u] - potential[arc.to];
        if (reduced < 0) reduced = 0;  // rounding noise
        const Cost candidate = dist[u] + reduced;
        if (candidate < dist[arc.to]) {
          dist[arc.to] = candidate;
          via[arc.to] = a;
        }
      }
    }
    if (!done[sink]) break;
    for (std::size_t v = 0; v < n; ++v) {
      potential[v] += std::min(dist[v], dist[sink]);
    }
    Capacity bottleneck = limit - sent;
    for (std::size_t v = sink; v != source;) {
      const Arc& arc = arcs_[via[v]];
      bottleneck = std::min(bottleneck, arc.capacity - arc.flow);
      v = arcs_[via[v] ^ 1].to;
    }
    for (std::size_t v = sink; v != source;) {
      arcs_[via[v]].flow += bottleneck;
      arcs_[via[v] ^ 1].flow -= bottleneck;
      v = arcs_[via[v] ^ 1].to;
    }
    sent += bottleneck;
  }
  return sent;
}

std::vector<Capacity> integerize_weights(std::span<const double> weights) {
  std::vector<Capacity> units(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || weights[i] > 1.5) {
      throw std::invalid_argument("weight outside [0, 1.5] cannot be integerized");
    }
    units[i] = std::llround(std::ldexp(weights[i], kWeightScaleExponent));
  }
  return units;
}

double deintegerize(Capacity units) {
  return std::ldexp(static_cast<double>(units), -kWeightScaleExponent);
}

}  // namespace linfty::flow
