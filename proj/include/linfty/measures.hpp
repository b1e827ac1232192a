#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace linfty {

/// A point of R^d. Coordinates are finite and d >= 1.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t k) const { return coords_[k]; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

using PointView = std::span<const double>;

double euclidean_distance(PointView a, PointView b);

/// Finite probability measure: distinct support points with positive weights
/// summing to one (within 1e-12).
class DiscreteMeasure {
 public:
  static constexpr double kSumTolerance = 1e-12;

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.front().dim(); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

 private:
  friend DiscreteMeasure make_measure(std::vector<Point>, std::vector<double>,
                                      bool);
  DiscreteMeasure(std::vector<Point> points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {}

  std::vector<Point> points_;
  std::vector<double> weights_;
};

using MeasurePtr = std::shared_ptr<const DiscreteMeasure>;

/// Builds a measure, merging duplicate points (first occurrence keeps its
/// position) and optionally rescaling the weights to sum to one.
/// Throws std::invalid_argument on length or dimension mismatch, negative or
/// non-finite weights, all-zero weights, or (without normalization) a total
/// mass outside [1-1e-12, 1+1e-12].
DiscreteMeasure make_measure(std::vector<Point> points,
                             std::vector<double> weights, bool normalize);

inline MeasurePtr share(DiscreteMeasure m) {
  return std::make_shared<const DiscreteMeasure>(std::move(m));
}

/// Uniform measure on the n^d cell centers of the box [lower, upper].
/// Points are ordered lexicographically with the first axis slowest.
DiscreteMeasure grid_measure(const Point& lower, const Point& upper,
                             std::size_t n_per_axis);

/// Uniform weights over the given (distinct) points.
DiscreteMeasure uniform_measure(std::vector<Point> points);

struct CouplingEntry {
  std::size_t i;
  std::size_t j;
  double mass;

  friend bool operator==(const CouplingEntry&, const CouplingEntry&) = default;
};

/// Sparse transport plan between two measures. Entries are kept sorted by
/// (i, j), each pair at most once, with strictly positive mass. Marginal
/// constraints are not enforced here; use validate_coupling.
class Coupling {
 public:
  Coupling(MeasurePtr source, MeasurePtr target,
           std::vector<CouplingEntry> entries);

  const DiscreteMeasure& source() const { return *source_; }
  const DiscreteMeasure& target() const { return *target_; }
  const MeasurePtr& source_ptr() const { return source_; }
  const MeasurePtr& target_ptr() const { return target_; }
  const std::vector<CouplingEntry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;

 private:
  MeasurePtr source_;
  MeasurePtr target_;
  std::vector<CouplingEntry> entries_;
};

/// Row-sum and column-sum measures on the source and target point sets.
std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const Coupling& plan);

Coupling product_coupling(MeasurePtr mu, MeasurePtr nu);

/// Diagonal coupling of a measure with itself.
Coupling identity_coupling(MeasurePtr mu);

struct CouplingCheck {
  bool pass = false;
  double max_row_deviation = 0.0;
  double max_column_deviation = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_column = 0;

  double max_deviation() const {
    return max_row_deviation > max_column_deviation ? max_row_deviation
                                                    : max_column_deviation;
  }
};

/// Absolute marginal tolerance used throughout.
inline constexpr double kMarginalTolerance = 1e-9;

CouplingCheck validate_coupling(const Coupling& plan,
                                double tol = kMarginalTolerance);

}  // namespace linfty
