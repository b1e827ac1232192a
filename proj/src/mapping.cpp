#include "linfty/mapping.hpp"

#include <algorithm>
#include <stdexcept>

namespace linfty {
namespace {

void check_assignment(const Assignment& t, const DiscreteMeasure& mu,
                      const DiscreteMeasure& nu) {
  if (t.size() != mu.size()) throw std::invalid_argument("assignment is not total on sources");
  for (std::size_t j : t) {
    if (j >= nu.size()) throw std::invalid_argument("assignment target out of range");
  }
}

}  // namespace

MapExtraction extract_map(const Coupling& plan, double dominance_tol) {
  if (!(dominance_tol >= 0.0 && dominance_tol < 1.0)) {
    throw std::invalid_argument("dominance tolerance must lie in [0, 1)");
  }
  const std::size_t m = plan.source().size();
  MapExtraction out;
  out.assignment.assign(m, kNoTarget);
  out.dominant_mass.assign(m, 0.0);
  out.per_source_split_count.assign(m, 0);
  std::vector<double> row_mass(m, 0.0);
  // Entries are sorted by (i, j), so a strict comparison keeps the lowest
  // target index among equal masses.
  for (const auto& e : plan.entries()) {
    row_mass[e.i] += e.mass;
    ++out.per_source_split_count[e.i];
    if (out.assignment[e.i] == kNoTarget || e.mass > out.dominant_mass[e.i]) {
      out.assignment[e.i] = e.j;
      out.dominant_mass[e.i] = e.mass;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (out.per_source_split_count[i] > 1) {
      out.nondeterministic_mass += row_mass[i] - out.dominant_mass[i];
    }
  }
  out.is_map = out.nondeterministic_mass <= dominance_tol;
  return out;
}

std::vector<std::size_t> improvement_region(const std::vector<std::size_t>& region,
                                            const Assignment& t,
                                            const Assignment& t_tilde,
                                            const CostFunction& c,
                                            const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu, double tol) {
  check_assignment(t, mu, nu);
  check_assignment(t_tilde, mu, nu);
  for (std::size_t x : region) {
    if (x >= mu.size()) throw std::invalid_argument("region index out of range");
    if (t[x] == t_tilde[x]) {
      throw std::invalid_argument("region contains a source where both maps agree");
    }
  }
  auto cost = [&](std::size_t i, std::size_t j) {
    return c(mu.point(i).coords(), nu.point(j).coords());
  };
  std::vector<std::size_t> out;
  for (std::size_t z = 0; z < mu.size(); ++z) {
    for (std::size_t x : region) {
      const double lhs = std::max(cost(x, t[z]), cost(z, t_tilde[x]));
      const double rhs = std::max(cost(x, t_tilde[x]), cost(z, t[z]));
      if (lhs < rhs - tol) {
        out.push_back(z);
        break;
      }
    }
  }
  return out;
}

UniquenessReport uniqueness_gap(const Assignment& t, const Assignment& t_tilde,
                                std::size_t atom_index, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu) {
  if (atom_index >= nu.size()) throw std::out_of_range("atom index out of range");
  check_assignment(t, mu, nu);
  check_assignment(t_tilde, mu, nu);
  UniquenessReport report;
  report.atom_index = atom_index;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const bool in_t = t[i] == atom_index;
    const bool in_tilde = t_tilde[i] == atom_index;
    if (in_t && !in_tilde) report.gap += mu.weight(i);
    if (in_t != in_tilde) report.symmetric_gap += mu.weight(i);
  }
  return report;
}

double source_mass(const std::vector<std::size_t>& sources, const DiscreteMeasure& mu) {
  double total = 0.0;
  for (std::size_t i : sources) total += mu.weight(i);
  return total;
}

}  // namespace linfty
