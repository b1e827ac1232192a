#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linfty/costs.hpp"
#include "linfty/measures.hpp"

namespace linfty {

// Sampling-based checks of the structural assumptions a cost must satisfy
// for infinity-monotone plans to be maps. A sampled check can only prove a
// failure, so the positive verdict is "inconclusive-pass".

enum class CostProperty {
  kQuasiconvexity,
  kStrictQuasiconvexity,
  kTwistKind,
  kZeroSetUniqueness,
  kSublevelSmoothness,
};

enum class Verdict { kInconclusivePass, kFail, kInconclusive };

std::string to_string(CostProperty property);
std::string to_string(Verdict verdict);

/// Points and scalars exhibiting a violation. Layout per property:
///   strict quasiconvexity: points {y, x, x_bar}, parameters {t, c_mid, max_end}
///   zero set:              points {y, best_x}, parameters {best_value}
///                          (or points {y, x_a, x_b} for two distinct zeros)
///   twist kind:            points {x, y, y_tilde}, parameters {lambda, angle}
///   sublevel smoothness:   points {y, p_k, p_k+1}, parameters {lambda, angle}
struct Witness {
  std::vector<Point> points;
  std::vector<double> parameters;
};

struct ValidationReport {
  CostProperty property = CostProperty::kStrictQuasiconvexity;
  Verdict verdict = Verdict::kInconclusivePass;
  std::optional<Witness> witness;
  std::size_t samples_tested = 0;
  std::size_t samples_skipped = 0;
  std::string detail;
};

struct SamplingBox {
  Point lower;
  Point upper;

  std::size_t dim() const { return lower.dim(); }
  /// Half the box diagonal.
  double scale() const;

  static SamplingBox around(const Point& center, double half_width);
  /// Bounding box of both supports, inflated by `inflation` of its extent
  /// on every side (a degenerate axis gets width 1).
  static SamplingBox from_supports(const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu,
                                   double inflation = 0.5);
};

inline constexpr double kQuasiconvexityTolerance = 1e-12;
inline constexpr double kTwistLevelTolerance = 1e-9;
inline constexpr double kTwistAngleTolerance = 1e-6;
inline constexpr double kTwistSeparation = 1e-6;
inline constexpr double kZeroSetTolerance = 1e-6;
inline constexpr double kCornerAngle = 0.2;

/// Fails when c((1-t)x + t x_bar, y) >= max(c(x,y), c(x_bar,y)) - 1e-12.
/// Returns c(mid, y) - max(c(x, y), c(x_bar, y)); strictness is violated when
/// this is >= -1e-12.
double quasiconvexity_violation(const CostFunction& c, PointView y, PointView x,
                                PointView x_bar, double t);

/// Random pairs in the box plus tangent probes along level sets.
/// Default box: y +/- 1 on every axis.
ValidationReport check_strict_quasiconvexity(
    const CostFunction& c, const Point& y, std::size_t trials,
    std::uint64_t rng_seed, const std::optional<SamplingBox>& box = std::nullopt);

struct ZeroSetResult {
  ValidationReport report;
  std::vector<Point> minimizers;
  std::vector<double> minimum_values;
};

/// Minimizes c(., y) by Nelder-Mead from several starts for every sampled y.
ZeroSetResult check_zero_set(const CostFunction& c,
                             const std::vector<Point>& y_samples,
                             std::uint64_t rng_seed = 0,
                             const std::optional<SamplingBox>& box = std::nullopt);

/// Samples configurations c(x,y) = c(x,y~) = lambda > 0 by 1-d root finding
/// and fails when the unit normals of the two sublevel sets at x agree within
/// 1e-6 rad while |y - y~| > 1e-6. Default box: [-1, 1]^d.
ValidationReport check_twist_kind(const CostFunction& c, std::size_t trials,
                                  std::uint64_t rng_seed,
                                  const std::optional<SamplingBox>& box = std::nullopt);

/// Traces the boundary of {z : c(z, y) <= lambda} along `directions` rays
/// (>= 360) from the minimizer and fails when adjacent normals differ by more
/// than 0.2 rad. Only d = 2 is supported; other dimensions are inconclusive.
ValidationReport sublevel_smoothness_probe(const CostFunction& c, const Point& y,
                                           double lambda, std::size_t directions);

}  // namespace linfty
