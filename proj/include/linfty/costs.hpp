#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "linfty/measures.hpp"

namespace linfty {

using Vector = std::vector<double>;

/// Scalar base function h: R^d -> R+ with optional analytic gradient.
struct BaseFunction {
  std::string name;
  std::function<double(PointView)> value;
  std::function<Vector(PointView)> gradient;  // empty when not available
};

/// h(v) = |v|^q (Euclidean norm), q >= 1.
BaseFunction power_norm(double exponent);

/// Invertible differentiable map F applied to the source variable.
struct SourceMap {
  std::string name;
  std::function<Vector(PointView)> forward;
  std::function<Vector(PointView)> inverse;
  std::function<Eigen::MatrixXd(PointView)> jacobian;

  static SourceMap identity(std::size_t dim);
  /// F(x) = A x + b; throws std::invalid_argument if |det A| <= 1e-12.
  static SourceMap affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
};

enum class CostFamily {
  kEuclidean,
  kSupNorm,
  kTranslationInvariant,
  kAffineComposed,
  kRescaled,
  kCustom,
};

std::string to_string(CostFamily family);

/// Evaluable cost c: R^d x R^d -> R+. Value type; cheap to copy.
class CostFunction {
 public:
  using Eval = std::function<double(PointView, PointView)>;
  using Gradient = std::function<Vector(PointView, PointView)>;

  static CostFunction euclidean(std::size_t dim);
  static CostFunction sup_norm(std::size_t dim);
  /// c(x, y) = h(y - x).
  static CostFunction translation_invariant(std::size_t dim, BaseFunction h);
  /// c(x, y) = h(G(y) - F(x)) with G(y) = A y + b.
  static CostFunction affine_composed(BaseFunction h, const Eigen::MatrixXd& a,
                                      const Eigen::VectorXd& b, SourceMap f);
  static CostFunction custom(std::size_t dim, std::string name, Eval eval,
                             Gradient gradient_x = {});

  /// phi o c for a strictly increasing phi; dphi is used for the gradient.
  CostFunction rescaled(std::string phi_name, std::function<double(double)> phi,
                        std::function<double(double)> dphi = {}) const;
  /// c^2, the rescaling used by invariance checks.
  CostFunction squared() const;

  double operator()(PointView x, PointView y) const { return eval_(x, y); }
  std::size_t dim() const { return dim_; }
  CostFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  bool has_analytic_gradient() const { return static_cast<bool>(grad_x_); }
  /// Analytic gradient in x; precondition has_analytic_gradient().
  Vector analytic_gradient_x(PointView x, PointView y) const {
    return grad_x_(x, y);
  }

 private:
  CostFunction(CostFamily family, std::string name, std::size_t dim, Eval eval,
               Gradient grad)
      : family_(family),
        name_(std::move(name)),
        dim_(dim),
        eval_(std::move(eval)),
        grad_x_(std::move(grad)) {}

  CostFamily family_;
  std::string name_;
  std::size_t dim_;
  Eval eval_;
  Gradient grad_x_;
};

/// Checked evaluation; throws std::invalid_argument on dimension mismatch.
double evaluate_cost(const CostFunction& c, const Point& x, const Point& y);

inline constexpr double kDefaultFiniteDifferenceStep = 1e-5;
inline constexpr double kVanishingGradient = 1e-10;

struct GradientSample {
  Vector value;
  bool analytic = false;
  /// Norm below 1e-10: the unit normal is undefined.
  bool vanishing = false;
};

/// Analytic gradient when available, otherwise central differences.
GradientSample gradient_x(const CostFunction& c, PointView x, PointView y,
                          double step = kDefaultFiniteDifferenceStep);

/// Central-difference gradient in the target variable.
GradientSample gradient_y(const CostFunction& c, PointView x, PointView y,
                          double step = kDefaultFiniteDifferenceStep);

/// Outer unit normal of the sublevel set of c(., y) through x, or nullopt when
/// the gradient vanishes.
std::optional<Vector> unit_normal(const CostFunction& c, PointView x,
                                  PointView y,
                                  double step = kDefaultFiniteDifferenceStep);

/// Dense m x n cost matrix, row-major.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const {
    return values[i * cols + j];
  }
};

CostMatrix compute_cost_matrix(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu, const CostFunction& c);

}  // namespace linfty
