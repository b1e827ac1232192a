#pragma once
// Reference computations used only by the tests. They share nothing with the
// library solvers beyond the cost matrix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "linfty/costs.hpp"
#include "linfty/measures.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<linfty::Point> random_points(std::mt19937_64& rng, std::size_t n,
                                                std::size_t dim, double lo = 0.0,
                                                double hi = 1.0) {
  std::vector<linfty::Point> pts;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> x(dim);
    for (double& v : x) v = lo + (hi - lo) * unit(rng);
    pts.emplace_back(std::move(x));
  }
  return pts;
}

inline Matrix cost_matrix(const linfty::DiscreteMeasure& mu, const linfty::DiscreteMeasure& nu,
                          const linfty::CostFunction& c) {
  Matrix m(mu.size(), std::vector<double>(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      m[i][j] = c(mu.point(i).coords(), nu.point(j).coords());
  return m;
}

// min over permutations of the max pair cost.
inline double permutation_bottleneck(const Matrix& cost) {
  std::vector<std::size_t> perm(cost.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) worst = std::max(worst, cost[i][perm[i]]);
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Minimum-sum assignment (Hungarian method, potentials form).
inline double assignment_min_sum(const Matrix& a) {
  const std::size_t n = a.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) total += a[p[j] - 1][j - 1];
  return total;
}

// Transportation LP min sum cost * mass by enumerating every basic feasible
// solution: each basis is a spanning tree of m + n - 1 cells, solved by leaf
// peeling. Small instances only.
inline double transport_lp_by_vertices(const Matrix& cost, const std::vector<double>& supply,
                                       const std::vector<double>& demand) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  const std::size_t cells = m * n;
  const std::size_t basis = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(basis);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  while (true) {
    std::vector<double> row = supply, col = demand, flow(cells, 0.0);
    std::vector<char> open(cells, 0);
    for (std::size_t k : pick) open[k] = 1;
    std::size_t remaining = basis;
    bool ok = true;
    while (remaining > 0 && ok) {
      bool progressed = false;
      // A row or column with exactly one open cell fixes that cell.
      for (std::size_t i = 0; i < m && !progressed; ++i) {
        std::size_t count = 0, last = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (open[i * n + j]) ++count, last = j;
        if (count == 1) {
          const double v = row[i];
          flow[i * n + last] = v;
          row[i] -= v;
          col[last] -= v;
          open[i * n + last] = 0;
          --remaining;
          progressed = true;
        }
      }
      for (std::size_t j = 0; j < n && !progressed; ++j) {
        std::size_t count = 0, last = 0;
        for (std::size_t i = 0; i < m; ++i)
          if (open[i * n + j]) ++count, last = i;
        if (count == 1) {
          const double v = col[j];
          flow[last * n + j] = v;
          row[last] -= v;
          col[j] -= v;
          open[last * n + j] = 0;
          --remaining;
          progressed = true;
        }
      }
      if (!progressed) ok = false;  // contains a cycle: not a basis
    }
    if (ok) {
      double total = 0.0;
      bool feasible = true;
      for (std::size_t k = 0; k < cells; ++k) {
        if (flow[k] < -1e-12) feasible = false;
        total += cost[k / n][k % n] * flow[k];
      }
      for (double r : row) feasible = feasible && std::abs(r) < 1e-9;
      for (double c : col) feasible = feasible && std::abs(c) < 1e-9;
      if (feasible) best = std::min(best, total);
    }
    // next combination
    std::size_t k = basis;
    while (k > 0 && pick[k - 1] == cells - basis + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t t = k; t < basis; ++t) pick[t] = pick[t - 1] + 1;
  }
  return best;
}

// Random coupling with `entries` distinct cells; sources and targets may
// repeat, and coordinates may be snapped to a coarse lattice to create ties.
struct RandomPlan {
  linfty::MeasurePtr mu;
  linfty::MeasurePtr nu;
  std::vector<linfty::CouplingEntry> entries;
};

inline RandomPlan random_plan(std::mt19937_64& rng, std::size_t entries, bool snap) {
  const std::size_t m = 1 + rng() % entries;
  const std::size_t n = 1 + rng() % entries;
  auto snap_point = [&](linfty::Point p) {
    if (!snap) return p;
    std::vector<double> x(p.coords().begin(), p.coords().end());
    for (double& v : x) v = std::round(v * 4.0) / 4.0;
    return linfty::Point(std::move(x));
  };
  std::vector<linfty::Point> xs, ys;
  // Distinct points so that measures keep their indices.
  auto fill = [&](std::vector<linfty::Point>& pts, std::size_t count) {
    while (pts.size() < count) {
      auto p = snap_point(random_points(rng, 1, 2)[0]);
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
  };
  fill(xs, m);
  fill(ys, n);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) cells.emplace_back(i, j);
  std::shuffle(cells.begin(), cells.end(), rng);
  // Every source and target must carry mass: cover them first.
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (std::size_t k = 0; k < std::max(xs.size(), ys.size()); ++k) {
    chosen.emplace_back(std::min(k, xs.size() - 1), std::min(k, ys.size() - 1));
  }
  for (const auto& cell : cells) {
    if (chosen.size() >= entries) break;
    if (std::find(chosen.begin(), chosen.end(), cell) == chosen.end()) chosen.push_back(cell);
  }
  std::vector<double> mass(chosen.size());
  double total = 0.0;
  for (double& w : mass) total += (w = 0.1 + unit(rng));
  std::vector<double> row(xs.size(), 0.0), col(ys.size(), 0.0);
  RandomPlan out;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    mass[k] /= total;
    row[chosen[k].first] += mass[k];
    col[chosen[k].second] += mass[k];
  }
  out.mu = linfty::share(linfty::make_measure(xs, row, true));
  out.nu = linfty::share(linfty::make_measure(ys, col, true));
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    out.entries.push_back({chosen[k].first, chosen[k].second, mass[k]});
  }
  return out;
}

}  // namespace oracle
