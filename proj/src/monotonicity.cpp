#include "linfty/monotonicity.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace linfty {
namespace {

// Costs between the sources and targets of support entries: cost[a][b] =
// c(x_a, y_b).
class SupportCosts {
 public:
  SupportCosts(const Coupling& plan, const CostFunction& c,
               std::vector<std::size_t> support)
      : support_(std::move(support)), size_(support_.size()), values_(size_ * size_) {
    const auto& entries = plan.entries();
    for (std::size_t a = 0; a < size_; ++a) {
      const auto x = plan.source().point(entries[support_[a]].i).coords();
      for (std::size_t b = 0; b < size_; ++b) {
        values_[a * size_ + b] = c(x, plan.target().point(entries[support_[b]].j).coords());
      }
    }
  }
  std::size_t size() const { return size_; }
  double operator()(std::size_t a, std::size_t b) const { return values_[a * size_ + b]; }
  std::size_t entry(std::size_t a) const { return support_[a]; }

 private:
  std::vector<std::size_t> support_;
  std::size_t size_;
  std::vector<double> values_;
};

// Fills own/permuted maxima for a cycle given as local support positions and
// stores the cycle as entry indices.
void record_cycle(MonotonicityCertificate& cert, const SupportCosts& costs,
                  const std::vector<std::size_t>& cycle) {
  cert.pass = false;
  cert.own_max = 0.0;
  cert.permuted_max = 0.0;
  cert.witness.clear();
  for (std::size_t t = 0; t < cycle.size(); ++t) {
    const std::size_t a = cycle[t];
    const std::size_t b = cycle[(t + 1) % cycle.size()];
    cert.own_max = std::max(cert.own_max, costs(a, a));
    cert.permuted_max = std::max(cert.permuted_max, costs(a, b));
    cert.witness.push_back(costs.entry(a));
  }
}

void check_tolerance(double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
}

}  // namespace

std::string to_string(CertificateKind kind) {
  return kind == CertificateKind::kIM ? "IM" : "ICM";
}

std::vector<std::size_t> effective_support(const Coupling& plan) {
  std::vector<std::size_t> support;
  const auto& entries = plan.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].mass >= kSupportMassFloor) support.push_back(k);
  }
  return support;
}

MonotonicityCertificate check_IM(const Coupling& plan, const CostFunction& c,
                                 double tol) {
  check_tolerance(tol);
  MonotonicityCertificate cert;
  cert.kind = CertificateKind::kIM;
  cert.tolerance = tol;
  const SupportCosts costs(plan, c, effective_support(plan));
  for (std::size_t a = 0; a < costs.size(); ++a) {
    for (std::size_t b = a + 1; b < costs.size(); ++b) {
      ++cert.pairs_checked;
      const double own = std::max(costs(a, a), costs(b, b));
      const double swapped = std::max(costs(a, b), costs(b, a));
      if (swapped < own - tol) {
        record_cycle(cert, costs, {a, b});
        return cert;
      }
    }
  }
  return cert;
}

MonotonicityCertificate check_ICM_cycles(const Coupling& plan,
                                         const CostFunction& c, double tol) {
  check_tolerance(tol);
  MonotonicityCertificate cert;
  cert.kind = CertificateKind::kICM;
  cert.tolerance = tol;
  const SupportCosts costs(plan, c, effective_support(plan));
  const std::size_t m = costs.size();
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(m);

  for (std::size_t e = 0; e < m; ++e) {
    ++cert.cycles_explored;
    const double bound = costs(e, e) - tol;
    std::fill(parent.begin(), parent.end(), kUnseen);
    std::queue<std::size_t> queue;
    queue.push(e);
    std::size_t closing = kUnseen;  // last vertex before returning to e
    while (!queue.empty() && closing == kUnseen) {
      const std::size_t u = queue.front();
      queue.pop();
      for (std::size_t b = 0; b < m; ++b) {
        if (!(costs(u, b) < bound)) continue;
        if (b == e) {
          closing = u;
          break;
        }
        if (parent[b] == kUnseen) {
          parent[b] = u;
          queue.push(b);
        }
      }
    }
    if (closing == kUnseen) continue;
    std::vector<std::size_t> cycle;
    for (std::size_t v = closing; v != e; v = parent[v]) cycle.push_back(v);
    cycle.push_back(e);
    std::reverse(cycle.begin(), cycle.end());
    record_cycle(cert, costs, cycle);
    return cert;
  }
  return cert;
}

MonotonicityCertificate brute_force_ICM(const Coupling& plan, const CostFunction& c,
                                        std::size_t max_subset, double tol) {
  check_tolerance(tol);
  const SupportCosts costs(plan, c, effective_support(plan));
  const std::size_t m = costs.size();
  if (m > 10) throw std::invalid_argument("brute force ICM limited to 10 support entries");
  if (max_subset > m) throw std::invalid_argument("max_subset exceeds support size");

  MonotonicityCertificate cert;
  cert.kind = CertificateKind::kICM;
  cert.tolerance = tol;
  std::vector<std::size_t> members;
  std::vector<std::size_t> image;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k < 2 || k > max_subset) continue;
    members.clear();
    for (std::size_t a = 0; a < m; ++a) {
      if (mask & (1u << a)) members.push_back(a);
    }
    double own = 0.0;
    std::size_t pivot = 0;
    for (std::size_t t = 0; t < k; ++t) {
      if (costs(members[t], members[t]) > own) {
        own = costs(members[t], members[t]);
        pivot = t;
      }
    }
    image.resize(k);
    std::iota(image.begin(), image.end(), std::size_t{0});
    do {
      ++cert.cycles_explored;
      double permuted = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        permuted = std::max(permuted, costs(members[t], members[image[t]]));
      }
      if (permuted < own - tol) {
        // The cycle of the permutation through the costliest own pair is
        // itself a violation.
        std::vector<std::size_t> cycle;
        std::size_t t = pivot;
        do {
          cycle.push_back(members[t]);
          t = image[t];
        } while (t != pivot);
        record_cycle(cert, costs, cycle);
        return cert;
      }
    } while (std::next_permutation(image.begin(), image.end()));
  }
  return cert;
}

std::optional<std::size_t> find_improving_pair(const Coupling& plan,
                                               const CostFunction& c,
                                               std::size_t x_index,
                                               std::size_t y_index, double tol) {
  check_tolerance(tol);
  if (x_index >= plan.source().size() || y_index >= plan.target().size()) {
    throw std::out_of_range("candidate pairing index out of range");
  }
  const auto x = plan.source().point(x_index).coords();
  const auto y = plan.target().point(y_index).coords();
  const double own_candidate = c(x, y);
  const auto& entries = plan.entries();
  for (std::size_t k : effective_support(plan)) {
    const auto xp = plan.source().point(entries[k].i).coords();
    const auto yp = plan.target().point(entries[k].j).coords();
    const double swapped = std::max(c(xp, y), c(x, yp));
    const double own = std::max(own_candidate, c(xp, yp));
    if (swapped < own - tol) return k;
  }
  return std::nullopt;
}

std::vector<std::size_t> destination_preimage(const Coupling& plan, const Point& y,
                                              double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be >= 0");
  if (y.dim() != plan.target().dim()) {
    throw std::invalid_argument("query point dimension mismatch");
  }
  std::vector<std::size_t> sources;
  const auto& entries = plan.entries();
  for (std::size_t k : effective_support(plan)) {
    if (euclidean_distance(plan.target().point(entries[k].j).coords(), y.coords()) <= r) {
      sources.push_back(entries[k].i);
    }
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  return sources;
}

bool witness_is_violation(const MonotonicityCertificate& cert, const Coupling& plan,
                          const CostFunction& c) {
  if (cert.pass || cert.witness.size() < 2) return false;
  const auto& entries = plan.entries();
  double own = 0.0;
  double permuted = 0.0;
  for (std::size_t t = 0; t < cert.witness.size(); ++t) {
    const auto& a = entries.at(cert.witness[t]);
    const auto& b = entries.at(cert.witness[(t + 1) % cert.witness.size()]);
    const auto x = plan.source().point(a.i).coords();
    own = std::max(own, c(x, plan.target().point(a.j).coords()));
    permuted = std::max(permuted, c(x, plan.target().point(b.j).coords()));
  }
  return permuted < own - cert.tolerance;
}

}  // namespace linfty
