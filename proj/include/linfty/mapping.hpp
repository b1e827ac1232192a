#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "linfty/costs.hpp"
#include "linfty/measures.hpp"

namespace linfty {

/// Target index per source.
using Assignment = std::vector<std::size_t>;

inline constexpr std::size_t kNoTarget = std::numeric_limits<std::size_t>::max();

struct MapExtraction {
  /// Dominant target per source (largest entry mass, lowest index on ties);
  /// kNoTarget for a source without entries.
  Assignment assignment;
  std::vector<double> dominant_mass;
  /// Total mass not on the dominant targets.
  double nondeterministic_mass = 0.0;
  std::vector<std::size_t> per_source_split_count;
  /// nondeterministic_mass <= dominance tolerance: the assignment is a map.
  bool is_map = false;
};

MapExtraction extract_map(const Coupling& plan, double dominance_tol = 1e-9);

/// Sources z for which some x in A has
///   max{c(x, T(z)), c(z, T~(x))} < max{c(x, T~(x)), c(z, T(z))} - tol.
/// Throws std::invalid_argument if T(i) == T~(i) for some i in A.
std::vector<std::size_t> improvement_region(const std::vector<std::size_t>& region,
                                            const Assignment& t,
                                            const Assignment& t_tilde,
                                            const CostFunction& c,
                                            const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu, double tol = 0.0);

struct UniquenessReport {
  std::size_t atom_index = 0;
  /// mu(T^-1{y0} \ T~^-1{y0})
  double gap = 0.0;
  /// mu of the symmetric difference of the two preimages.
  double symmetric_gap = 0.0;
};

UniquenessReport uniqueness_gap(const Assignment& t, const Assignment& t_tilde,
                                std::size_t atom_index, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu);

/// mu-mass of a set of source indices.
double source_mass(const std::vector<std::size_t>& sources, const DiscreteMeasure& mu);

}  // namespace linfty
