#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "linfty/costs.hpp"
#include "linfty/measures.hpp"

namespace linfty {

enum class CertificateKind { kIM, kICM };
std::string to_string(CertificateKind kind);

/// Entries lighter than this are quantization dust and never enter a check.
inline constexpr double kSupportMassFloor = 1e-12;
inline constexpr double kExactPlanTolerance = 1e-9;
inline constexpr double kFlowPlanTolerance = 1e-6;

struct MonotonicityCertificate {
  CertificateKind kind = CertificateKind::kIM;
  bool pass = true;
  /// Indices into plan.entries(). For IM the two offending entries; for ICM a
  /// cycle a0, a1, ..., where source of a_t is sent to the target of a_{t+1}.
  std::vector<std::size_t> witness;
  /// max of own costs over the witness vs max after the swap/shift.
  double own_max = 0.0;
  double permuted_max = 0.0;
  double tolerance = 0.0;
  std::size_t pairs_checked = 0;
  std::size_t cycles_explored = 0;
};

/// Entry indices with mass >= kSupportMassFloor, in (i, j) order.
std::vector<std::size_t> effective_support(const Coupling& plan);

/// Pairwise check: fails on the first pair of support entries with
/// max{c(x,y'), c(x',y)} < max{c(x,y), c(x',y')} - tol.
MonotonicityCertificate check_IM(const Coupling& plan, const CostFunction& c,
                                 double tol = kExactPlanTolerance);

/// Exact cycle criterion. For each pivot entry e of cost v, arc a -> b iff
/// c(x_a, y_b) < v - tol; the support fails iff some pivot sits on a directed
/// cycle of its own digraph. The witness is the shortest such cycle (BFS).
MonotonicityCertificate check_ICM_cycles(const Coupling& plan,
                                         const CostFunction& c,
                                         double tol = kExactPlanTolerance);

/// Reference implementation: every subset up to max_subset entries and every
/// permutation of it. Support limited to 10 entries.
MonotonicityCertificate brute_force_ICM(const Coupling& plan, const CostFunction& c,
                                        std::size_t max_subset,
                                        double tol = kExactPlanTolerance);

/// First support entry (x', y') with
/// max{c(x', y), c(x, y')} < max{c(x, y), c(x', y')} - tol, where (x, y) is
/// the candidate pairing (source x_index, target y_index).
std::optional<std::size_t> find_improving_pair(const Coupling& plan,
                                               const CostFunction& c,
                                               std::size_t x_index,
                                               std::size_t y_index,
                                               double tol = kExactPlanTolerance);

/// Sources sending mass to targets within Euclidean distance r of y.
std::vector<std::size_t> destination_preimage(const Coupling& plan, const Point& y,
                                              double r);

/// Re-evaluates a fail witness; true iff it is a strict violation beyond the
/// certificate tolerance.
bool witness_is_violation(const MonotonicityCertificate& cert, const Coupling& plan,
                          const CostFunction& c);

}  // namespace linfty
