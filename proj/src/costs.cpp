#include "linfty/costs.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace linfty {
namespace {

double norm(PointView v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

void require_dim(std::size_t expected, PointView x, PointView y) {
  if (x.size() != expected || y.size() != expected) {
    throw std::invalid_argument(
        "cost dimension mismatch: expected " + std::to_string(expected) +
        ", got " + std::to_string(x.size()) + " and " +
        std::to_string(y.size()));
  }
}

Eigen::Map<const Eigen::VectorXd> as_eigen(PointView v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

Vector to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

BaseFunction power_norm(double exponent) {
  if (!(exponent >= 1.0)) {
    throw std::invalid_argument("power_norm exponent must be >= 1");
  }
  BaseFunction h;
  h.name = "|v|^" + std::to_string(exponent);
  h.value = [exponent](PointView v) { return std::pow(norm(v), exponent); };
  h.gradient = [exponent](PointView v) {
    const double r = norm(v);
    Vector g(v.size(), 0.0);
    if (r == 0.0) return g;
    const double scale = exponent * std::pow(r, exponent - 2.0);
    for (std::size_t k = 0; k < v.size(); ++k) g[k] = scale * v[k];
    return g;
  };
  return h;
}

SourceMap SourceMap::identity(std::size_t dim) {
  SourceMap f;
  f.name = "identity";
  f.forward = [](PointView x) { return Vector(x.begin(), x.end()); };
  f.inverse = [](PointView z) { return Vector(z.begin(), z.end()); };
  f.jacobian = [dim](PointView) {
    return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                     static_cast<Eigen::Index>(dim))
        .eval();
  };
  return f;
}

SourceMap SourceMap::affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
    throw std::invalid_argument("affine source map needs square A matching b");
  }
  if (std::abs(a.determinant()) <= 1e-12) {
    throw std::invalid_argument("affine source map matrix is singular");
  }
  const Eigen::MatrixXd inv = a.inverse();
  SourceMap f;
  f.name = "affine";
  f.forward = [a, b](PointView x) { return to_vector(a * as_eigen(x) + b); };
  f.inverse = [inv, b](PointView z) {
    return to_vector(inv * (as_eigen(z) - b));
  };
  f.jacobian = [a](PointView) { return a; };
  return f;
}

std::string to_string(CostFamily family) {
  switch (family) {
    case CostFamily::kEuclidean: return "euclidean";
    case CostFamily::kSupNorm: return "sup";
    case CostFamily::kTranslationInvariant: return "translation-invariant";
    case CostFamily::kAffineComposed: return "affine-composed";
    case CostFamily::kRescaled: return "rescaled";
    case CostFamily::kCustom: return "custom";
  }
  return "unknown";
}

CostFunction CostFunction::euclidean(std::size_t dim) {
  return CostFunction(
      CostFamily::kEuclidean, "euclidean", dim,
      [dim](PointView x, PointView y) {
        require_dim(dim, x, y);
        return euclidean_distance(x, y);
      },
      [](PointView x, PointView y) {
        Vector g(x.size(), 0.0);
        const double r = euclidean_distance(x, y);
        if (r == 0.0) return g;
        for (std::size_t k = 0; k < x.size(); ++k) g[k] = (x[k] - y[k]) / r;
        return g;
      });
}

CostFunction CostFunction::sup_norm(std::size_t dim) {
  return CostFunction(CostFamily::kSupNorm, "sup", dim,
                      [dim](PointView x, PointView y) {
                        require_dim(dim, x, y);
                        double m = 0.0;
                        for (std::size_t k = 0; k < x.size(); ++k) {
                          m = std::max(m, std::abs(x[k] - y[k]));
                        }
                        return m;
                      },
                      {});
}

CostFunction CostFunction::translation_invariant(std::size_t dim,
                                                 BaseFunction h) {
  auto value = h.value;
  Gradient grad;
  if (h.gradient) {
    grad = [hg = h.gradient](PointView x, PointView y) {
      Vector v(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) v[k] = y[k] - x[k];
      Vector g = hg(v);
      for (double& a : g) a = -a;
      return g;
    };
  }
  return CostFunction(
      CostFamily::kTranslationInvariant, "h(y-x), h=" + h.name, dim,
      [dim, value](PointView x, PointView y) {
        require_dim(dim, x, y);
        Vector v(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) v[k] = y[k] - x[k];
        return value(v);
      },
      std::move(grad));
}

CostFunction CostFunction::affine_composed(BaseFunction h,
                                           const Eigen::MatrixXd& a,
                                           const Eigen::VectorXd& b,
                                           SourceMap f) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
    throw std::invalid_argument("affine cost needs square A matching b");
  }
  if (std::abs(a.determinant()) <= 1e-12) {
    throw std::invalid_argument("affine cost matrix A is singular (|det A| <= 1e-12)");
  }
  const auto dim = static_cast<std::size_t>(a.rows());
  auto residual = [a, b, fwd = f.forward](PointView x, PointView y) {
    const Vector fx = fwd(x);
    return (a * as_eigen(y) + b - as_eigen(fx)).eval();
  };
  Gradient grad;
  if (h.gradient) {
    grad = [residual, hg = h.gradient, jac = f.jacobian](PointView x,
                                                         PointView y) {
      const Eigen::VectorXd v = residual(x, y);
      const Vector gh = hg(Vector(v.data(), v.data() + v.size()));
      const Eigen::VectorXd g = -(jac(x).transpose() * as_eigen(gh));
      return to_vector(g);
    };
  }
  return CostFunction(
      CostFamily::kAffineComposed, "h(Ay+b-F(x)), h=" + h.name + ", F=" + f.name,
      dim,
      [dim, residual, value = h.value](PointView x, PointView y) {
        require_dim(dim, x, y);
        const Eigen::VectorXd v = residual(x, y);
        return value(PointView(v.data(), static_cast<std::size_t>(v.size())));
      },
      std::move(grad));
}

CostFunction CostFunction::custom(std::size_t dim, std::string name, Eval eval,
                                  Gradient gradient_x) {
  return CostFunction(
      CostFamily::kCustom, std::move(name), dim,
      [dim, eval = std::move(eval)](PointView x, PointView y) {
        require_dim(dim, x, y);
        return eval(x, y);
      },
      std::move(gradient_x));
}

CostFunction CostFunction::rescaled(std::string phi_name,
                                    std::function<double(double)> phi,
                                    std::function<double(double)> dphi) const {
  Gradient grad;
  if (dphi && grad_x_) {
    grad = [base = eval_, base_grad = grad_x_, dphi](PointView x, PointView y) {
      Vector g = base_grad(x, y);
      const double s = dphi(base(x, y));
      for (double& a : g) a *= s;
      return g;
    };
  }
  return CostFunction(
      CostFamily::kRescaled, phi_name + "(" + name_ + ")", dim_,
      [base = eval_, phi = std::move(phi)](PointView x, PointView y) {
        return phi(base(x, y));
      },
      std::move(grad));
}

CostFunction CostFunction::squared() const {
  return rescaled(
      "square", [](double t) { return t * t; }, [](double t) { return 2.0 * t; });
}

double evaluate_cost(const CostFunction& c, const Point& x, const Point& y) {
  require_dim(c.dim(), x.coords(), y.coords());
  return c(x.coords(), y.coords());
}

namespace {

GradientSample finish(Vector g, bool analytic) {
  GradientSample s;
  s.vanishing = norm(g) < kVanishingGradient;
  s.value = std::move(g);
  s.analytic = analytic;
  return s;
}

}  // namespace

GradientSample gradient_x(const CostFunction& c, PointView x, PointView y,
                          double step) {
  require_dim(c.dim(), x, y);
  if (c.has_analytic_gradient()) {
    return finish(c.analytic_gradient_x(x, y), true);
  }
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Vector xp(x.begin(), x.end());
  Vector g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double saved = xp[k];
    xp[k] = saved + step;
    const double fp = c(xp, y);
    xp[k] = saved - step;
    const double fm = c(xp, y);
    xp[k] = saved;
    g[k] = (fp - fm) / (2.0 * step);
  }
  return finish(std::move(g), false);
}

GradientSample gradient_y(const CostFunction& c, PointView x, PointView y,
                          double step) {
  require_dim(c.dim(), x, y);
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Vector yp(y.begin(), y.end());
  Vector g(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double saved = yp[k];
    yp[k] = saved + step;
    const double fp = c(x, yp);
    yp[k] = saved - step;
    const double fm = c(x, yp);
    yp[k] = saved;
    g[k] = (fp - fm) / (2.0 * step);
  }
  return finish(std::move(g), false);
}

std::optional<Vector> unit_normal(const CostFunction& c, PointView x,
                                  PointView y, double step) {
  GradientSample g = gradient_x(c, x, y, step);
  if (g.vanishing) return std::nullopt;
  const double n = norm(g.value);
  for (double& a : g.value) a /= n;
  return std::move(g.value);
}

CostMatrix compute_cost_matrix(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const CostFunction& c) {
  if (mu.dim() != c.dim() || nu.dim() != c.dim()) {
    throw std::invalid_argument("measure dimension does not match cost");
  }
  CostMatrix m;
  m.rows = mu.size();
  m.cols = nu.size();
  m.values.resize(m.rows * m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto x = mu.point(i).coords();
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double v = c(x, nu.point(j).coords());
      if (!std::isfinite(v) || v < 0.0) {
        throw std::domain_error("cost must be finite and nonnegative");
      }
      m.values[i * m.cols + j] = v;
    }
  }
  return m;
}

}  // namespace linfty
