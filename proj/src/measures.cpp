#include "linfty/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace linfty {

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) {
    throw std::invalid_argument("point must have dimension >= 1");
  }
  for (double v : coords_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("point coordinates must be finite");
    }
  }
}

Point::Point(std::initializer_list<double> coords)
    : Point(std::vector<double>(coords)) {}

double euclidean_distance(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

DiscreteMeasure make_measure(std::vector<Point> points,
                             std::vector<double> weights, bool normalize) {
  if (points.size() != weights.size()) {
    throw std::invalid_argument("points and weights differ in length (" +
                                std::to_string(points.size()) + " vs " +
                                std::to_string(weights.size()) + ")");
  }
  if (points.empty()) {
    throw std::invalid_argument("measure needs at least one point");
  }
  const std::size_t d = points.front().dim();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim() != d) {
      throw std::invalid_argument("dimension mismatch at point " +
                                  std::to_string(i));
    }
    if (!std::isfinite(weights[i])) {
      throw std::invalid_argument("non-finite weight at index " +
                                  std::to_string(i));
    }
    if (weights[i] < 0.0) {
      throw std::invalid_argument("negative weight at index " +
                                  std::to_string(i));
    }
  }

  // Merge duplicates, drop zero-weight points.
  std::map<Point, std::size_t> slot;
  std::vector<Point> merged_points;
  std::vector<double> merged_weights;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(points[i], merged_points.size());
    if (inserted) {
      merged_points.push_back(std::move(points[i]));
      merged_weights.push_back(weights[i]);
    } else {
      merged_weights[it->second] += weights[i];
    }
  }
  std::vector<Point> kept_points;
  std::vector<double> kept_weights;
  for (std::size_t i = 0; i < merged_points.size(); ++i) {
    if (merged_weights[i] > 0.0) {
      kept_points.push_back(std::move(merged_points[i]));
      kept_weights.push_back(merged_weights[i]);
    }
  }
  if (kept_points.empty()) {
    throw std::invalid_argument("all weights are zero");
  }

  const double total =
      std::accumulate(kept_weights.begin(), kept_weights.end(), 0.0);
  if (normalize) {
    for (double& w : kept_weights) w /= total;
  } else if (std::abs(total - 1.0) > DiscreteMeasure::kSumTolerance) {
    throw std::invalid_argument("weights sum to " + std::to_string(total) +
                                ", expected 1 (or pass normalize)");
  }
  return DiscreteMeasure(std::move(kept_points), std::move(kept_weights));
}

DiscreteMeasure grid_measure(const Point& lower, const Point& upper,
                             std::size_t n_per_axis) {
  if (n_per_axis < 1) {
    throw std::invalid_argument("grid needs n_per_axis >= 1");
  }
  if (lower.dim() != upper.dim()) {
    throw std::invalid_argument("grid corners differ in dimension");
  }
  const std::size_t d = lower.dim();
  for (std::size_t k = 0; k < d; ++k) {
    if (!(lower[k] < upper[k])) {
      throw std::invalid_argument("degenerate grid box along axis " +
                                  std::to_string(k));
    }
  }
  std::size_t count = 1;
  for (std::size_t k = 0; k < d; ++k) count *= n_per_axis;

  std::vector<Point> points;
  points.reserve(count);
  std::vector<std::size_t> index(d, 0);
  const double n = static_cast<double>(n_per_axis);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> coords(d);
    for (std::size_t k = 0; k < d; ++k) {
      const double t = (2.0 * static_cast<double>(index[k]) + 1.0) / (2.0 * n);
      coords[k] = lower[k] + (upper[k] - lower[k]) * t;
    }
    points.emplace_back(std::move(coords));
    for (std::size_t k = d; k-- > 0;) {
      if (++index[k] < n_per_axis) break;
      index[k] = 0;
    }
  }
  std::vector<double> weights(count, 1.0 / static_cast<double>(count));
  return make_measure(std::move(points), std::move(weights), true);
}

DiscreteMeasure uniform_measure(std::vector<Point> points) {
  std::vector<double> weights(points.size(), 1.0);
  return make_measure(std::move(points), std::move(weights), true);
}

Coupling::Coupling(MeasurePtr source, MeasurePtr target,
                   std::vector<CouplingEntry> entries)
    : source_(std::move(source)),
      target_(std::move(target)),
      entries_(std::move(entries)) {
  if (!source_ || !target_) {
    throw std::invalid_argument("coupling needs both measures");
  }
  for (const auto& e : entries_) {
    if (e.i >= source_->size() || e.j >= target_->size()) {
      throw std::out_of_range("coupling entry (" + std::to_string(e.i) + "," +
                              std::to_string(e.j) + ") out of range");
    }
    if (!(e.mass > 0.0) || !std::isfinite(e.mass)) {
      throw std::invalid_argument("coupling entry mass must be positive");
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].i == entries_[k - 1].i &&
        entries_[k].j == entries_[k - 1].j) {
      throw std::invalid_argument("duplicate coupling entry (" +
                                  std::to_string(entries_[k].i) + "," +
                                  std::to_string(entries_[k].j) + ")");
    }
  }
}

std::vector<double> Coupling::row_sums() const {
  std::vector<double> rows(source_->size(), 0.0);
  for (const auto& e : entries_) rows[e.i] += e.mass;
  return rows;
}

std::vector<double> Coupling::column_sums() const {
  std::vector<double> cols(target_->size(), 0.0);
  for (const auto& e : entries_) cols[e.j] += e.mass;
  return cols;
}

std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const Coupling& plan) {
  // Row/column totals carry quantization noise, so renormalize.
  return {make_measure(plan.source().points(), plan.row_sums(), true),
          make_measure(plan.target().points(), plan.column_sums(), true)};
}

Coupling product_coupling(MeasurePtr mu, MeasurePtr nu) {
  std::vector<CouplingEntry> entries;
  entries.reserve(mu->size() * nu->size());
  for (std::size_t i = 0; i < mu->size(); ++i) {
    for (std::size_t j = 0; j < nu->size(); ++j) {
      entries.push_back({i, j, mu->weight(i) * nu->weight(j)});
    }
  }
  return Coupling(std::move(mu), std::move(nu), std::move(entries));
}

Coupling identity_coupling(MeasurePtr mu) {
  std::vector<CouplingEntry> entries;
  entries.reserve(mu->size());
  for (std::size_t i = 0; i < mu->size(); ++i) {
    entries.push_back({i, i, mu->weight(i)});
  }
  return Coupling(mu, mu, std::move(entries));
}

CouplingCheck validate_coupling(const Coupling& plan, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  CouplingCheck check;
  const auto rows = plan.row_sums();
  const auto cols = plan.column_sums();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double dev = std::abs(rows[i] - plan.source().weight(i));
    if (dev > check.max_row_deviation) {
      check.max_row_deviation = dev;
      check.worst_row = i;
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const double dev = std::abs(cols[j] - plan.target().weight(j));
    if (dev > check.max_column_deviation) {
      check.max_column_deviation = dev;
      check.worst_column = j;
    }
  }
  check.pass = check.max_row_deviation <= tol && check.max_column_deviation <= tol;
  return check;
}

}  // namespace linfty
