#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "linfty/experiment.hpp"
#include "linfty/io.hpp"
#include "linfty/pnorm.hpp"

namespace linfty::experiment {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ConfigError(context + ": " + message);
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(context.empty() ? key : context + "." + key, "unknown field");
    }
  }
}

const json& require_object(const json& j, const std::string& context) {
  if (!j.is_object()) fail(context, "expected an object");
  return j;
}

double get_number(const json& j, const std::string& context) {
  if (!j.is_number()) fail(context, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(context, "expected a finite number");
  return v;
}

std::size_t get_count(const json& j, const std::string& context) {
  if (!j.is_number_unsigned()) fail(context, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::string get_string(const json& j, const std::string& context) {
  if (!j.is_string()) fail(context, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_vector(const json& j, const std::string& context) {
  if (!j.is_array()) fail(context, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(get_number(j[k], context + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Point get_point(const json& j, const std::string& context) {
  auto coords = get_vector(j, context);
  if (coords.empty()) fail(context, "empty point");
  return Point(std::move(coords));
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

}  // namespace

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kBottleneck: return "bottleneck";
    case Scenario::kPSchedule: return "p-schedule";
    case Scenario::kCertify: return "certify";
    case Scenario::kCounterexample: return "counterexample";
    case Scenario::kRotation: return "rotation";
    case Scenario::kMongeTrend: return "monge-trend";
    case Scenario::kUniquenessAtom: return "uniqueness-atom";
    case Scenario::kCostValidate: return "cost-validate";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  for (auto s : {Scenario::kBottleneck, Scenario::kPSchedule, Scenario::kCertify,
                 Scenario::kCounterexample, Scenario::kRotation, Scenario::kMongeTrend,
                 Scenario::kUniquenessAtom, Scenario::kCostValidate}) {
    if (to_string(s) == name) return s;
  }
  fail("scenario", "unknown scenario '" + name + "'");
}

CostSpec parse_cost_json(const json& j, const std::string& context) {
  if (j.is_string()) return parse_cost_spec(j.get<std::string>());
  require_object(j, context);
  reject_unknown(j, {"family", "exponent", "A", "b"}, context);
  CostSpec spec;
  if (!j.contains("family")) fail(context + ".family", "missing");
  spec.family = get_string(j["family"], context + ".family");
  if (spec.family == "sup-norm") spec.family = "sup";
  if (spec.family != "euclidean" && spec.family != "sup" && spec.family != "power" &&
      spec.family != "affine") {
    fail(context + ".family", "unknown cost family '" + spec.family + "'");
  }
  const bool has_exponent = spec.family == "power" || spec.family == "affine";
  if (j.contains("exponent")) {
    if (!has_exponent) fail(context + ".exponent", "not a parameter of " + spec.family);
    spec.exponent = get_number(j["exponent"], context + ".exponent");
    if (spec.exponent < 1.0) fail(context + ".exponent", "must be >= 1");
  }
  if (spec.family == "affine") {
    if (!j.contains("A")) fail(context + ".A", "missing");
    const auto& a = j["A"];
    if (!a.is_array() || a.empty()) fail(context + ".A", "expected a square matrix");
    for (std::size_t r = 0; r < a.size(); ++r) {
      spec.a.push_back(get_vector(a[r], context + ".A[" + std::to_string(r) + "]"));
      if (spec.a.back().size() != a.size()) fail(context + ".A", "matrix must be square");
    }
    spec.b = j.contains("b") ? get_vector(j["b"], context + ".b")
                             : std::vector<double>(spec.a.size(), 0.0);
    if (spec.b.size() != spec.a.size()) fail(context + ".b", "length differs from A");
    try {
      make_cost(spec, spec.a.size());
    } catch (const std::invalid_argument& e) {
      fail(context + ".A", e.what());
    }
  } else if (j.contains("A") || j.contains("b")) {
    fail(context, "A and b only apply to the affine family");
  }
  return spec;
}

CostSpec parse_cost_spec(const std::string& text) {
  const std::string s = trim(text);
  if (!s.empty() && s.front() == '{') {
    json j;
    try {
      j = json::parse(s);
    } catch (const json::parse_error& e) {
      fail("cost", e.what());
    }
    return parse_cost_json(j, "cost");
  }
  CostSpec spec;
  if (s == "euclidean") return spec;
  if (s == "sup" || s == "sup-norm") {
    spec.family = "sup";
    return spec;
  }
  if (s.rfind("power:", 0) == 0) {
    spec.family = "power";
    const std::string q = s.substr(6);
    char* end = nullptr;
    spec.exponent = std::strtod(q.c_str(), &end);
    if (q.empty() || end != q.c_str() + q.size() || !(spec.exponent >= 1.0) ||
        !std::isfinite(spec.exponent)) {
      fail("cost", "power exponent must be a number >= 1");
    }
    return spec;
  }
  fail("cost", "unknown cost spec '" + s + "' (euclidean, sup, power:q or JSON)");
}

CostFunction make_cost(const CostSpec& spec, std::size_t dim) {
  if (spec.family == "euclidean") return CostFunction::euclidean(dim);
  if (spec.family == "sup") return CostFunction::sup_norm(dim);
  if (spec.family == "power") {
    return CostFunction::translation_invariant(dim, power_norm(spec.exponent));
  }
  if (spec.family == "affine") {
    if (spec.a.size() != dim) {
      throw std::invalid_argument("affine cost matrix does not match dimension " +
                                  std::to_string(dim));
    }
    Eigen::MatrixXd a(dim, dim);
    Eigen::VectorXd b(dim);
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t k = 0; k < dim; ++k) a(r, k) = spec.a[r][k];
      b(r) = spec.b[r];
    }
    return CostFunction::affine_composed(power_norm(spec.exponent), a, b,
                                         SourceMap::identity(dim));
  }
  throw std::invalid_argument("unknown cost family " + spec.family);
}

MeasureSpec parse_measure_json(const json& j, const std::string& context,
                               const std::filesystem::path& base_dir) {
  require_object(j, context);
  MeasureSpec spec;
  if (j.contains("grid")) {
    reject_unknown(j, {"grid"}, context);
    const std::string ctx = context + ".grid";
    const auto& g = require_object(j["grid"], ctx);
    reject_unknown(g, {"lower", "upper", "n"}, ctx);
    for (const char* key : {"lower", "upper", "n"}) {
      if (!g.contains(key)) fail(ctx + "." + key, "missing");
    }
    spec.kind = MeasureSpec::Kind::kGrid;
    spec.lower = get_point(g["lower"], ctx + ".lower");
    spec.upper = get_point(g["upper"], ctx + ".upper");
    spec.n = get_count(g["n"], ctx + ".n");
    if (spec.n == 0) fail(ctx + ".n", "must be positive");
    if (spec.lower.dim() != spec.upper.dim()) fail(ctx + ".upper", "dimension differs from lower");
    for (std::size_t k = 0; k < spec.lower.dim(); ++k) {
      if (!(spec.lower[k] < spec.upper[k])) fail(ctx + ".upper", "must exceed lower");
    }
  } else if (j.contains("csv")) {
    reject_unknown(j, {"csv"}, context);
    spec.kind = MeasureSpec::Kind::kCsv;
    spec.csv = get_string(j["csv"], context + ".csv");
    if (spec.csv.is_relative()) spec.csv = base_dir / spec.csv;
  } else if (j.contains("points")) {
    reject_unknown(j, {"points", "weights"}, context);
    spec.kind = MeasureSpec::Kind::kPoints;
    const auto& pts = j["points"];
    if (!pts.is_array() || pts.empty()) fail(context + ".points", "expected a nonempty array");
    for (std::size_t k = 0; k < pts.size(); ++k) {
      spec.points.push_back(get_point(pts[k], context + ".points[" + std::to_string(k) + "]"));
    }
    if (j.contains("weights")) {
      spec.weights = get_vector(j["weights"], context + ".weights");
      if (spec.weights.size() != spec.points.size()) {
        fail(context + ".weights", "length differs from points");
      }
      for (std::size_t k = 0; k < spec.weights.size(); ++k) {
        if (spec.weights[k] < 0.0) {
          fail(context + ".weights[" + std::to_string(k) + "]", "negative weight");
        }
      }
    } else {
      spec.weights.assign(spec.points.size(), 1.0);
    }
    try {
      make_measure(spec.points, spec.weights, true);
    } catch (const std::invalid_argument& e) {
      fail(context, e.what());
    }
  } else if (j.contains("random")) {
    reject_unknown(j, {"random"}, context);
    const std::string ctx = context + ".random";
    const auto& r = require_object(j["random"], ctx);
    reject_unknown(r, {"n", "dim"}, ctx);
    if (!r.contains("n")) fail(ctx + ".n", "missing");
    spec.kind = MeasureSpec::Kind::kRandom;
    spec.n = get_count(r["n"], ctx + ".n");
    if (spec.n == 0) fail(ctx + ".n", "must be positive");
    if (r.contains("dim")) spec.dim = get_count(r["dim"], ctx + ".dim");
    if (spec.dim == 0) fail(ctx + ".dim", "must be positive");
  } else {
    fail(context, "expected one of grid, csv, points, random");
  }
  return spec;
}

MeasurePtr build_measure(const MeasureSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case MeasureSpec::Kind::kGrid:
      return share(grid_measure(spec.lower, spec.upper, spec.n));
    case MeasureSpec::Kind::kCsv:
      try {
        return io::read_measure_csv(spec.csv);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    case MeasureSpec::Kind::kPoints:
      return share(make_measure(spec.points, spec.weights, true));
    case MeasureSpec::Kind::kRandom: {
      std::mt19937_64 rng(seed);
      std::vector<Point> points;
      for (std::size_t k = 0; k < spec.n; ++k) {
        std::vector<double> coords(spec.dim);
        // 53 random bits per coordinate; portable across standard libraries.
        for (double& v : coords) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        points.emplace_back(std::move(coords));
      }
      return share(uniform_measure(std::move(points)));
    }
  }
  throw std::logic_error("unhandled measure kind");
}

ExperimentConfig parse_config_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail("config", "expected a JSON object");
  reject_unknown(j,
                 {"scenario", "seed", "output_dir", "mu", "nu", "cost", "plan", "solver", "n",
                  "resolutions", "points", "step", "trials", "dim", "expect"},
                 "");
  ExperimentConfig config;
  if (!j.contains("scenario")) fail("scenario", "missing");
  config.scenario = parse_scenario(get_string(j["scenario"], "scenario"));
  const Scenario s = config.scenario;
  const std::string name = to_string(s);

  auto only_for = [&](const char* key, std::initializer_list<Scenario> allowed) {
    if (j.contains(key) && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      fail(key, "not used by scenario " + name);
    }
  };
  only_for("mu", {Scenario::kBottleneck, Scenario::kPSchedule, Scenario::kCertify});
  only_for("nu", {Scenario::kBottleneck, Scenario::kPSchedule, Scenario::kCertify});
  only_for("cost", {Scenario::kBottleneck, Scenario::kPSchedule, Scenario::kCertify,
                    Scenario::kCostValidate});
  only_for("plan", {Scenario::kCertify});
  only_for("n", {Scenario::kCounterexample, Scenario::kUniquenessAtom});
  only_for("resolutions", {Scenario::kMongeTrend});
  only_for("points", {Scenario::kRotation});
  only_for("step", {Scenario::kRotation});
  only_for("trials", {Scenario::kCostValidate});
  only_for("dim", {Scenario::kCostValidate});
  only_for("expect", {Scenario::kCertify, Scenario::kCostValidate});

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    config.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    config.output_dir = get_string(j["output_dir"], "output_dir");
    if (config.output_dir.is_relative()) config.output_dir = base_dir / config.output_dir;
  } else {
    config.output_dir = base_dir / "out";
  }

  if (s == Scenario::kBottleneck || s == Scenario::kPSchedule || s == Scenario::kCertify) {
    for (const char* key : {"mu", "nu"}) {
      if (!j.contains(key)) fail(key, "missing (required by scenario " + name + ")");
    }
    config.mu = parse_measure_json(j["mu"], "mu", base_dir);
    config.nu = parse_measure_json(j["nu"], "nu", base_dir);
  }
  if (j.contains("cost")) config.cost = parse_cost_json(j["cost"], "cost");
  if (s == Scenario::kCertify) {
    if (!j.contains("plan")) fail("plan", "missing (required by scenario certify)");
    config.plan_csv = get_string(j["plan"], "plan");
    if (config.plan_csv.is_relative()) config.plan_csv = base_dir / config.plan_csv;
  }

  config.p_schedule = default_p_schedule();
  if (j.contains("solver")) {
    const auto& solver = require_object(j["solver"], "solver");
    reject_unknown(solver, {"p_schedule", "tolerance"}, "solver");
    if (solver.contains("p_schedule")) {
      config.p_schedule = get_vector(solver["p_schedule"], "solver.p_schedule");
      if (config.p_schedule.empty()) fail("solver.p_schedule", "empty schedule");
      for (std::size_t k = 0; k < config.p_schedule.size(); ++k) {
        const std::string ctx = "solver.p_schedule[" + std::to_string(k) + "]";
        if (config.p_schedule[k] < 1.0) fail(ctx, "exponent must be >= 1");
        if (config.p_schedule[k] > kMaxExponent) fail(ctx, "exponent above 1024");
        if (k > 0 && !(config.p_schedule[k] > config.p_schedule[k - 1])) {
          fail(ctx, "schedule must be increasing");
        }
      }
    }
    if (solver.contains("tolerance")) {
      config.tolerance = get_number(solver["tolerance"], "solver.tolerance");
      if (*config.tolerance < 0.0) fail("solver.tolerance", "must be >= 0");
    }
  }

  if (s == Scenario::kCounterexample) config.n = 6;
  if (s == Scenario::kUniquenessAtom) config.n = 8;
  if (j.contains("n")) {
    config.n = get_count(j["n"], "n");
    if (config.n < 2) fail("n", "grid resolution must be >= 2");
  }
  if (s == Scenario::kMongeTrend) {
    config.resolutions = {4, 8, 16};
    if (j.contains("resolutions")) {
      const auto& r = j["resolutions"];
      if (!r.is_array() || r.empty()) fail("resolutions", "expected a nonempty array");
      config.resolutions.clear();
      for (std::size_t k = 0; k < r.size(); ++k) {
        const std::string ctx = "resolutions[" + std::to_string(k) + "]";
        config.resolutions.push_back(get_count(r[k], ctx));
        if (config.resolutions.back() == 0) fail(ctx, "must be positive");
        if (k > 0 && config.resolutions[k] <= config.resolutions[k - 1]) {
          fail(ctx, "resolutions must be increasing");
        }
      }
    }
  }
  if (j.contains("points")) config.points = get_count(j["points"], "points");
  if (j.contains("step")) config.step = get_count(j["step"], "step");
  if (s == Scenario::kRotation) {
    if (config.points < 3) fail("points", "need at least 3 points");
    if (config.step == 0 || config.step >= config.points) {
      fail("step", "must lie in [1, points)");
    }
  }
  if (j.contains("trials")) {
    config.trials = get_count(j["trials"], "trials");
    if (config.trials == 0) fail("trials", "must be positive");
  }
  if (j.contains("dim")) {
    config.dim = get_count(j["dim"], "dim");
    if (config.dim == 0) fail("dim", "must be positive");
  }
  if (s == Scenario::kCostValidate && config.cost.family == "affine" &&
      config.cost.a.size() != config.dim) {
    fail("cost.A", "size differs from dim " + std::to_string(config.dim));
  }

  if (j.contains("expect")) {
    if (s == Scenario::kCertify) {
      config.expect = get_string(j["expect"], "expect");
      if (config.expect != "none" && config.expect != "IM" && config.expect != "ICM") {
        fail("expect", "expected one of none, IM, ICM");
      }
    } else {
      const auto& e = require_object(j["expect"], "expect");
      reject_unknown(e,
                     {"strict_quasiconvexity", "zero_set", "twist_kind", "sublevel_smoothness"},
                     "expect");
      for (const auto& [key, value] : e.items()) {
        const std::string v = get_string(value, "expect." + key);
        if (v != "pass" && v != "fail") fail("expect." + key, "expected pass or fail");
        config.expectations.emplace_back(key, v);
      }
    }
  }
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot read config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config_json(j, path.parent_path());
}

}  // namespace linfty::experiment
