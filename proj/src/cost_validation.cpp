#include "linfty/cost_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace linfty {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One independent stream per trial so trials can be reordered or split.
std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t trial) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(trial)));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector sample_box(const SamplingBox& box, std::mt19937_64& rng) {
  Vector v(box.dim());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = uniform(rng, box.lower[k], box.upper[k]);
  }
  return v;
}

double norm(const Vector& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

Vector axpy(const Vector& base, double s, const Vector& dir) {
  Vector out(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) out[k] = base[k] + s * dir[k];
  return out;
}

Vector normalized(Vector v) {
  const double n = norm(v);
  for (double& a : v) a /= n;
  return v;
}

Vector random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector v(dim);
  do {
    for (double& a : v) a = gauss(rng);
  } while (norm(v) < 1e-8);
  return normalized(std::move(v));
}

// Random unit vector orthogonal to the unit vector `n` (dim >= 2).
std::optional<Vector> random_tangent(const Vector& n, std::mt19937_64& rng) {
  if (n.size() < 2) return std::nullopt;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Vector u = random_unit(n.size(), rng);
    const double proj = dot(u, n);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] -= proj * n[k];
    if (norm(u) > 1e-6) return normalized(std::move(u));
  }
  return std::nullopt;
}

// Angle between unit vectors, accurate for tiny angles.
double angle_between(const Vector& a, const Vector& b) {
  Vector d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return 2.0 * std::asin(std::min(1.0, norm(d) / 2.0));
}

// Root of f on [a, b] where f(a) and f(b) have opposite signs.
double bracketed_root(const std::function<double(double)>& f, double a,
                      double b) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  std::uintmax_t max_iter = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

// Expands from t_inside (f < 0) along sign(direction) until f > 0.
std::optional<double> expand_to_outside(const std::function<double(double)>& f,
                                        double t_inside, double step,
                                        int max_doublings = 80) {
  double t = t_inside + step;
  for (int k = 0; k < max_doublings; ++k) {
    if (f(t) > 0.0) return t;
    step *= 2.0;
    t = t_inside + step;
  }
  return std::nullopt;
}

struct Minimum {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct NelderMeadContext {
  const CostFunction* cost;
  PointView y;
};

double nm_objective(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const NelderMeadContext*>(params);
  const PointView x(v->data, v->size);
  return (*ctx->cost)(x, ctx->y);
}

Minimum minimize_over_x(const CostFunction& c, PointView y, const Vector& start,
                        double initial_step) {
  const std::size_t d = start.size();
  NelderMeadContext ctx{&c, y};
  gsl_multimin_function fn{&nm_objective, d, &ctx};

  gsl_vector* x0 = gsl_vector_alloc(d);
  gsl_vector* steps = gsl_vector_alloc(d);
  for (std::size_t k = 0; k < d; ++k) {
    gsl_vector_set(x0, k, start[k]);
    gsl_vector_set(steps, k, initial_step);
  }
  gsl_multimin_fminimizer* solver =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d);
  gsl_multimin_fminimizer_set(solver, &fn, x0, steps);

  Minimum result;
  double best = solver->fval;
  int stalled = 0;
  for (int iter = 0; iter < 20000; ++iter) {
    const int status = gsl_multimin_fminimizer_iterate(solver);
    const double size = gsl_multimin_fminimizer_size(solver);
    // A tiny simplex that no longer improves has hit rounding: the values
    // are flat to double precision there (e.g. 1 + |v| near v = 0).
    stalled = solver->fval < best ? 0 : stalled + 1;
    best = std::min(best, solver->fval);
    if (status != GSL_SUCCESS || stalled >= 500) {
      result.converged = size <= 1e-7;
      break;
    }
    if (gsl_multimin_test_size(size, 1e-11) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }
  result.value = solver->fval;
  result.x.assign(solver->x->data, solver->x->data + d);
  gsl_multimin_fminimizer_free(solver);
  gsl_vector_free(steps);
  gsl_vector_free(x0);
  return result;
}

ValidationReport make_fail(CostProperty property, Witness w,
                           std::size_t tested, std::size_t skipped,
                           std::string detail) {
  ValidationReport r;
  r.property = property;
  r.verdict = Verdict::kFail;
  r.witness = std::move(w);
  r.samples_tested = tested;
  r.samples_skipped = skipped;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

std::string to_string(CostProperty property) {
  switch (property) {
    case CostProperty::kQuasiconvexity: return "quasiconvexity";
    case CostProperty::kStrictQuasiconvexity: return "strict quasiconvexity";
    case CostProperty::kTwistKind: return "twist-kind";
    case CostProperty::kZeroSetUniqueness: return "zero-set uniqueness";
    case CostProperty::kSublevelSmoothness: return "sublevel smoothness";
  }
  return "unknown";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kInconclusivePass: return "inconclusive-pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

double SamplingBox::scale() const {
  double s = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) {
    const double e = upper[k] - lower[k];
    s += e * e;
  }
  return 0.5 * std::sqrt(s);
}

SamplingBox SamplingBox::around(const Point& center, double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("box half-width must be positive");
  Vector lo(center.dim());
  Vector hi(center.dim());
  for (std::size_t k = 0; k < center.dim(); ++k) {
    lo[k] = center[k] - half_width;
    hi[k] = center[k] + half_width;
  }
  return {Point(std::move(lo)), Point(std::move(hi))};
}

SamplingBox SamplingBox::from_supports(const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu,
                                       double inflation) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("measures differ in dimension");
  const std::size_t d = mu.dim();
  Vector lo(d, std::numeric_limits<double>::infinity());
  Vector hi(d, -std::numeric_limits<double>::infinity());
  for (const auto* m : {&mu, &nu}) {
    for (const auto& p : m->points()) {
      for (std::size_t k = 0; k < d; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    double extent = hi[k] - lo[k];
    if (extent <= 0.0) extent = 1.0;
    lo[k] -= inflation * extent;
    hi[k] += inflation * extent;
  }
  return {Point(std::move(lo)), Point(std::move(hi))};
}

double quasiconvexity_violation(const CostFunction& c, PointView y, PointView x,
                                PointView x_bar, double t) {
  Vector mid(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    mid[k] = (1.0 - t) * x[k] + t * x_bar[k];
  }
  return c(mid, y) - std::max(c(x, y), c(x_bar, y));
}

ValidationReport check_strict_quasiconvexity(
    const CostFunction& c, const Point& y, std::size_t trials,
    std::uint64_t rng_seed, const std::optional<SamplingBox>& box_opt) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (y.dim() != c.dim()) throw std::invalid_argument("y dimension mismatch");
  const SamplingBox box = box_opt ? *box_opt : SamplingBox::around(y, 1.0);
  const double scale = box.scale();

  ValidationReport report;
  report.property = CostProperty::kStrictQuasiconvexity;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto rng = trial_rng(rng_seed, trial);
    const Vector x = sample_box(box, rng);
    Vector x_bar;
    if (trial % 2 == 0 || c.dim() < 2) {
      x_bar = sample_box(box, rng);
    } else {
      // Tangent probe: step along the level set of c(., y) through x.
      const auto n = unit_normal(c, x, y.coords());
      if (!n) {
        ++report.samples_skipped;
        continue;
      }
      const auto u = random_tangent(*n, rng);
      if (!u) {
        ++report.samples_skipped;
        continue;
      }
      x_bar = axpy(x, scale * uniform(rng, 0.01, 0.5), *u);
    }
    if (x == x_bar) {
      ++report.samples_skipped;
      continue;
    }
    const double t = uniform(rng, 0.1, 0.9);
    ++report.samples_tested;
    const double gap = quasiconvexity_violation(c, y.coords(), x, x_bar, t);
    if (gap >= -kQuasiconvexityTolerance) {
      Vector mid(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) mid[k] = (1 - t) * x[k] + t * x_bar[k];
      const double max_end = std::max(c(x, y.coords()), c(x_bar, y.coords()));
      return make_fail(CostProperty::kStrictQuasiconvexity,
                       Witness{{y, Point(x), Point(x_bar)},
                               {t, c(mid, y.coords()), max_end}},
                       report.samples_tested, report.samples_skipped,
                       "convex combination not strictly below endpoint max");
    }
  }
  report.verdict = Verdict::kInconclusivePass;
  return report;
}

ZeroSetResult check_zero_set(const CostFunction& c,
                             const std::vector<Point>& y_samples,
                             std::uint64_t rng_seed,
                             const std::optional<SamplingBox>& box_opt) {
  ZeroSetResult result;
  ValidationReport& report = result.report;
  report.property = CostProperty::kZeroSetUniqueness;
  bool any_unconverged = false;

  for (std::size_t s = 0; s < y_samples.size(); ++s) {
    const Point& y = y_samples[s];
    if (y.dim() != c.dim()) throw std::invalid_argument("y dimension mismatch");
    const SamplingBox box = box_opt ? *box_opt : SamplingBox::around(y, 1.0);
    auto rng = trial_rng(rng_seed, s);

    std::vector<Vector> starts{Vector(y.coords().begin(), y.coords().end())};
    for (int k = 0; k < 4; ++k) starts.push_back(sample_box(box, rng));

    std::vector<Minimum> minima;
    for (const auto& start : starts) {
      minima.push_back(minimize_over_x(c, y.coords(), start, 0.1 * box.scale()));
    }
    const auto best = std::min_element(
        minima.begin(), minima.end(),
        [](const Minimum& a, const Minimum& b) { return a.value < b.value; });
    ++report.samples_tested;
    result.minimizers.emplace_back(best->x);
    result.minimum_values.push_back(best->value);

    if (best->value > kZeroSetTolerance) {
      if (!best->converged) {
        any_unconverged = true;
        continue;
      }
      result.report = make_fail(CostProperty::kZeroSetUniqueness,
                                Witness{{y, Point(best->x)}, {best->value}},
                                report.samples_tested, report.samples_skipped,
                                "infimum of c(., y) is not zero");
      return result;
    }
    for (const auto& m : minima) {
      if (m.converged && m.value <= kZeroSetTolerance) {
        Vector diff = m.x;
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= best->x[k];
        if (norm(diff) > 1e-3) {
          result.report = make_fail(
              CostProperty::kZeroSetUniqueness,
              Witness{{y, Point(best->x), Point(m.x)}, {best->value, m.value}},
              report.samples_tested, report.samples_skipped,
              "c(., y) vanishes at two distinct points");
          return result;
        }
      }
    }
  }
  report.verdict = any_unconverged ? Verdict::kInconclusive : Verdict::kInconclusivePass;
  if (any_unconverged) report.detail = "optimizer did not converge";
  return result;
}

ValidationReport check_twist_kind(const CostFunction& c, std::size_t trials,
                                  std::uint64_t rng_seed,
                                  const std::optional<SamplingBox>& box_opt) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::size_t d = c.dim();
  const SamplingBox box =
      box_opt ? *box_opt : SamplingBox::around(Point(Vector(d, 0.0)), 1.0);
  const double scale = box.scale();

  ValidationReport report;
  report.property = CostProperty::kTwistKind;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto rng = trial_rng(rng_seed, trial);
    const Vector x = sample_box(box, rng);
    const Vector y_tilde = sample_box(box, rng);
    const double lambda = c(x, y_tilde);
    const auto n_tilde = unit_normal(c, x, y_tilde);
    const auto gy = gradient_y(c, x, y_tilde);
    if (lambda <= kTwistLevelTolerance || !n_tilde || gy.vanishing) {
      ++report.samples_skipped;
      continue;
    }
    const Vector outward = normalized(gy.value);  // outer normal of C^x_lambda at y~

    std::optional<Vector> y;
    const bool tangent = (trial % 2 == 0) && d >= 2;
    if (tangent) {
      // Slide along the tangent plane, then return to the level set along
      // the normal direction.
      const auto u = random_tangent(outward, rng);
      if (u) {
        const double s = trial == 0 ? 1.0 : scale * uniform(rng, 0.05, 1.0);
        const Vector y0 = axpy(y_tilde, s, *u);
        auto f = [&](double t) { return c(x, axpy(y0, t, outward)) - lambda; };
        const double f0 = f(0.0);
        if (std::abs(f0) <= 1e-13) {
          y = y0;
        } else {
          const double dir = f0 > 0.0 ? -1.0 : 1.0;
          // Walk until the sign flips.
          double step = dir * s;
          std::optional<double> other;
          for (int k = 0; k < 80 && !other; ++k, step *= 2.0) {
            if ((f(step) > 0.0) != (f0 > 0.0)) other = step;
          }
          if (other) y = axpy(y0, bracketed_root(f, 0.0, *other), outward);
        }
      }
    } else {
      // Chord through y~: enter the sublevel set and exit at its far side.
      const Vector u = [&] {
        Vector v = random_unit(d, rng);
        if (dot(v, outward) > 0.0) {
          for (double& a : v) a = -a;
        }
        return v;
      }();
      auto f = [&](double s) { return c(x, axpy(y_tilde, s, u)) - lambda; };
      std::optional<double> inside;
      for (double s = 1e-3 * scale; s > 1e-12 * scale; s *= 0.5) {
        if (f(s) < 0.0) {
          inside = s;
          break;
        }
      }
      if (inside) {
        if (auto outside = expand_to_outside(f, *inside, *inside)) {
          y = axpy(y_tilde, bracketed_root(f, *inside, *outside), u);
        }
      }
    }

    if (!y || std::abs(c(x, *y) - lambda) > kTwistLevelTolerance) {
      ++report.samples_skipped;
      continue;
    }
    Vector diff = *y;
    for (std::size_t k = 0; k < d; ++k) diff[k] -= y_tilde[k];
    const auto n = unit_normal(c, x, *y);
    if (norm(diff) <= kTwistSeparation || !n) {
      ++report.samples_skipped;
      continue;
    }
    ++report.samples_tested;
    const double angle = angle_between(*n, *n_tilde);
    if (angle < kTwistAngleTolerance) {
      return make_fail(CostProperty::kTwistKind,
                       Witness{{Point(x), Point(*y), Point(y_tilde)}, {lambda, angle}},
                       report.samples_tested, report.samples_skipped,
                       "equal levels and equal normals at distinct targets");
    }
  }
  report.verdict = Verdict::kInconclusivePass;
  return report;
}

ValidationReport sublevel_smoothness_probe(const CostFunction& c, const Point& y,
                                           double lambda, std::size_t directions) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (directions < 360) throw std::invalid_argument("need at least 360 directions");
  ValidationReport report;
  report.property = CostProperty::kSublevelSmoothness;
  if (c.dim() != 2 || y.dim() != 2) {
    report.verdict = Verdict::kInconclusive;
    report.detail = "boundary tracing supports d = 2 only";
    return report;
  }

  const Vector y_vec(y.coords().begin(), y.coords().end());
  const Minimum center = minimize_over_x(c, y.coords(), y_vec, 0.1);
  if (!(center.value < lambda)) {
    report.verdict = Verdict::kInconclusive;
    report.detail = "sublevel set has empty interior";
    return report;
  }

  std::vector<std::optional<Vector>> normals(directions);
  std::vector<Vector> boundary(directions);
  for (std::size_t k = 0; k < directions; ++k) {
    const double theta =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(directions);
    const Vector u{std::cos(theta), std::sin(theta)};
    auto f = [&](double r) { return c(axpy(center.x, r, u), y.coords()) - lambda; };
    const auto outside = expand_to_outside(f, 0.0, 1e-3, 200);
    if (!outside) {
      report.verdict = Verdict::kInconclusive;
      report.detail = "sublevel set is unbounded";
      return report;
    }
    boundary[k] = axpy(center.x, bracketed_root(f, 0.0, *outside), u);
    normals[k] = unit_normal(c, boundary[k], y.coords());
    if (!normals[k]) ++report.samples_skipped;
  }

  for (std::size_t k = 0; k < directions; ++k) {
    const std::size_t next = (k + 1) % directions;
    if (!normals[k] || !normals[next]) continue;
    ++report.samples_tested;
    const double angle = angle_between(*normals[k], *normals[next]);
    if (angle > kCornerAngle) {
      return make_fail(CostProperty::kSublevelSmoothness,
                       Witness{{y, Point(boundary[k]), Point(boundary[next])},
                               {lambda, angle}},
                       report.samples_tested, report.samples_skipped,
                       "adjacent boundary normals jump (corner)");
    }
  }
  report.verdict = Verdict::kInconclusivePass;
  return report;
}

}  // namespace linfty
