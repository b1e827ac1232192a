#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "linfty/bottleneck.hpp"
#include "linfty/cost_validation.hpp"
#include "linfty/experiment.hpp"
#include "linfty/io.hpp"
#include "linfty/mapping.hpp"
#include "linfty/monotonicity.hpp"
#include "linfty/pnorm.hpp"

namespace linfty::experiment {
namespace {

using ordered_json = nlohmann::ordered_json;
using io::format_number;

// Collects report rows, artifacts and assertion outcomes of one run.
class Output {
 public:
  explicit Output(const ExperimentConfig& config) : config_(config) {
    certificate_["scenario"] = to_string(config.scenario);
    certificate_["seed"] = config.seed;
  }

  void add(const std::string& key, const std::string& value) {
    summary_ += to_string(config_.scenario) + "," + key + "," + value + "\n";
  }
  void add(const std::string& key, double value) { add(key, format_number(value)); }
  void add_count(const std::string& key, std::size_t value) {
    add(key, std::to_string(value));
  }
  void add_verdict(const std::string& key, bool pass) { add(key, pass ? "pass" : "fail"); }

  // A built-in assertion; a failure turns the exit status into 2.
  void require(bool ok, const std::string& name, const std::string& detail) {
    add("check_" + name, ok ? "pass" : "fail");
    if (!ok) failures_.push_back(name + ": " + detail);
  }

  void certificate(const std::string& label, const MonotonicityCertificate& cert,
                   const Coupling& plan) {
    auto j = io::certificate_json(cert, plan);
    ordered_json entry;
    entry["label"] = label;
    for (auto& [key, value] : j.items()) entry[key] = value;
    certificate_["certificates"].push_back(std::move(entry));
  }
  ordered_json& json() { return certificate_; }

  void file(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  RunResult write() {
    RunResult result;
    const auto dir = config_.output_dir;
    std::filesystem::create_directories(dir);
    files_.emplace_back("summary.csv", "scenario,key,value\n" + summary_);
    files_.emplace_back("certificate.json", certificate_.dump(2) + "\n");
    for (const auto& [name, content] : files_) {
      io::write_file_atomic(dir / name, content);
      result.files.push_back(dir / name);
    }
    result.failures = failures_;
    result.exit_code = failures_.empty() ? 0 : 2;
    return result;
  }

 private:
  const ExperimentConfig& config_;
  std::string summary_;
  ordered_json certificate_ = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::string> failures_;
};

constexpr std::uint64_t kNuSalt = 0x9E3779B97F4A7C15ULL;

std::pair<MeasurePtr, MeasurePtr> configured_measures(const ExperimentConfig& config) {
  auto mu = build_measure(*config.mu, config.seed);
  auto nu = build_measure(*config.nu, config.seed ^ kNuSalt);
  if (mu->dim() != nu->dim()) throw ConfigError("nu: dimension differs from mu");
  return {mu, nu};
}

CostFunction configured_cost(const ExperimentConfig& config, std::size_t dim) {
  try {
    return make_cost(config.cost, dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("cost: ") + e.what());
  }
}

std::string describe_witness(const MonotonicityCertificate& cert, const Coupling& plan) {
  std::string out;
  for (std::size_t k : cert.witness) {
    const auto& e = plan.entries()[k];
    out += (out.empty() ? "" : " ") + std::to_string(e.i) + "->" + std::to_string(e.j);
  }
  return out;
}

void add_certificate_rows(Output& out, const std::string& label,
                          const MonotonicityCertificate& cert, const Coupling& plan) {
  out.add_verdict(label, cert.pass);
  if (!cert.pass) {
    out.add(label + "_witness", describe_witness(cert, plan));
    out.add(label + "_own_max", cert.own_max);
    out.add(label + "_permuted_max", cert.permuted_max);
  }
  out.certificate(label, cert, plan);
}

std::string convergence_rows(const PSchedule& schedule, const std::string& prefix = "") {
  std::string rows;
  for (const auto& s : schedule.solutions) {
    rows += prefix + format_number(s.p) + "," + format_number(s.value) + "," +
            format_number(schedule.bottleneck_value - s.value) + "\n";
  }
  return rows;
}

void report_schedule(Output& out, const PSchedule& schedule) {
  const double terminal = schedule.solutions.back().value;
  out.add("terminal_p", schedule.exponents.back());
  out.add("terminal_value", terminal);
  const double lambda = schedule.bottleneck_value;
  out.add("terminal_relative_gap", lambda > 0 ? (lambda - terminal) / lambda : 0.0);
}

// Scenario: exact bottleneck solve on configured measures.
void run_bottleneck(const ExperimentConfig& config, Output& out) {
  const auto [mu, nu] = configured_measures(config);
  const auto c = configured_cost(config, mu->dim());
  const double tol = config.tolerance.value_or(kFlowPlanTolerance);
  const auto sol = solve_bottleneck(mu, nu, c);
  out.add("value", sol.value);
  out.add_count("threshold_index", sol.threshold_index);
  out.add_count("distinct_costs", sol.distinct_costs_count);
  out.add_count("support_size", sol.plan.support_size());
  const auto check = validate_coupling(sol.plan);
  out.add("marginal_deviation", check.max_deviation());
  out.require(check.pass, "marginals", "plan marginals off by " +
                                           format_number(check.max_deviation()));
  const double worst = plan_max_cost(sol.plan, c);
  out.require(worst <= sol.value + 1e-12, "value_bound",
              "support cost " + format_number(worst) + " above value");
  add_certificate_rows(out, "IM", check_IM(sol.plan, c, tol), sol.plan);
  add_certificate_rows(out, "ICM", check_ICM_cycles(sol.plan, c, tol), sol.plan);
  out.file("plan.csv", io::coupling_csv(sol.plan));
  out.file("mu.csv", io::measure_csv(*mu));
  out.file("nu.csv", io::measure_csv(*nu));
}

// Scenario: p-schedule toward the bottleneck value.
void run_schedule(const ExperimentConfig& config, Output& out) {
  const auto [mu, nu] = configured_measures(config);
  const auto c = configured_cost(config, mu->dim());
  const double tol = config.tolerance.value_or(kFlowPlanTolerance);
  const auto bottleneck = solve_bottleneck(mu, nu, c);
  const auto schedule = run_p_schedule(mu, nu, c, config.p_schedule, bottleneck.value);
  out.add("bottleneck_value", bottleneck.value);
  report_schedule(out, schedule);
  out.require(schedule.values_nondecreasing, "values_nondecreasing",
              "C_p decreased along the schedule");
  out.require(schedule.values_bounded, "values_bounded", "C_p above the bottleneck value");
  const auto im = check_IM(schedule.terminal_plan, c, tol);
  add_certificate_rows(out, "IM", im, schedule.terminal_plan);
  add_certificate_rows(out, "ICM", check_ICM_cycles(schedule.terminal_plan, c, tol),
                       schedule.terminal_plan);
  out.require(im.pass, "terminal_IM",
              "witness " + describe_witness(im, schedule.terminal_plan));
  const auto map = extract_map(schedule.terminal_plan);
  out.add("nondeterministic_mass", map.nondeterministic_mass);
  out.file("convergence.csv", "p,C_p,gap_to_bottleneck\n" + convergence_rows(schedule));
  out.file("plan.csv", io::coupling_csv(schedule.terminal_plan));
  out.file("map.csv", io::map_csv(map, *mu));
  out.file("mu.csv", io::measure_csv(*mu));
  out.file("nu.csv", io::measure_csv(*nu));
}

// Scenario: certify a plan read from CSV.
void run_certify(const ExperimentConfig& config, Output& out) {
  const auto [mu, nu] = configured_measures(config);
  const auto c = configured_cost(config, mu->dim());
  const double tol = config.tolerance.value_or(kFlowPlanTolerance);
  std::optional<Coupling> plan;
  try {
    plan.emplace(io::read_coupling_csv(config.plan_csv, mu, nu));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  const auto check = validate_coupling(*plan);
  out.add("marginal_deviation", check.max_deviation());
  out.require(check.pass, "marginals",
              "plan marginals off by " + format_number(check.max_deviation()));
  const auto im = check_IM(*plan, c, tol);
  const auto icm = check_ICM_cycles(*plan, c, tol);
  add_certificate_rows(out, "IM", im, *plan);
  add_certificate_rows(out, "ICM", icm, *plan);
  out.add("plan_max_cost", plan_max_cost(*plan, c));
  if (config.expect == "IM" || config.expect == "ICM") {
    out.require(im.pass, "IM", "witness " + describe_witness(im, *plan));
  }
  if (config.expect == "ICM") {
    out.require(icm.pass, "ICM", "witness " + describe_witness(icm, *plan));
  }
  out.file("plan.csv", io::coupling_csv(*plan));
}

// The plan spreading each source evenly over the targets of its column.
Coupling column_spread_plan(const MeasurePtr& mu, const MeasurePtr& nu, std::size_t n) {
  std::vector<CouplingEntry> entries;
  for (std::size_t i = 0; i < mu->size(); ++i) {
    const std::size_t column = i / n;
    for (std::size_t b = 0; b < n; ++b) {
      entries.push_back({i, column * n + b, mu->weight(i) / static_cast<double>(n)});
    }
  }
  return Coupling(mu, nu, std::move(entries));
}

// Scenario: grids on the unit square and its translate by (10, 0), sup-norm.
void run_counterexample(const ExperimentConfig& config, Output& out) {
  const std::size_t n = config.n;
  const double tol = config.tolerance.value_or(kExactPlanTolerance);
  const auto mu = share(grid_measure(Point{0.0, 0.0}, Point{1.0, 1.0}, n));
  const auto nu = share(grid_measure(Point{10.0, 0.0}, Point{11.0, 1.0}, n));
  const auto c = CostFunction::sup_norm(2);
  out.add_count("n", n);

  const auto bottleneck = solve_bottleneck(mu, nu, c);
  out.add("value", bottleneck.value);
  out.require(std::abs(bottleneck.value - 10.0) <= 1e-9, "value",
              "bottleneck value " + format_number(bottleneck.value) + " != 10");

  const auto plan = column_spread_plan(mu, nu, n);
  const auto im = check_IM(plan, c, tol);
  const auto icm = check_ICM_cycles(plan, c, tol);
  add_certificate_rows(out, "IM", im, plan);
  add_certificate_rows(out, "ICM", icm, plan);
  out.require(im.pass, "IM", "witness " + describe_witness(im, plan));
  out.require(icm.pass, "ICM", "witness " + describe_witness(icm, plan));
  out.add("plan_max_cost", plan_max_cost(plan, c));

  const auto map = extract_map(plan);
  const double expected = 1.0 - 1.0 / static_cast<double>(n);
  out.add("nondeterministic_mass", map.nondeterministic_mass);
  out.require(std::abs(map.nondeterministic_mass - expected) <= 1e-9,
              "nondeterministic_mass",
              format_number(map.nondeterministic_mass) + " != " + format_number(expected));

  // The p-schedule on the same instance, reported for comparison.
  const auto schedule = run_p_schedule(mu, nu, c, config.p_schedule, bottleneck.value);
  report_schedule(out, schedule);
  out.file("convergence.csv", "p,C_p,gap_to_bottleneck\n" + convergence_rows(schedule));
  out.file("plan.csv", io::coupling_csv(plan));
  out.file("map.csv", io::map_csv(map, *mu));
  out.file("mu.csv", io::measure_csv(*mu));
  out.file("nu.csv", io::measure_csv(*nu));
}

// Scenario: uniform points on the unit circle, each sent `step` places on.
void run_rotation(const ExperimentConfig& config, Output& out) {
  const std::size_t count = config.points;
  const std::size_t step = config.step;
  const double tol = config.tolerance.value_or(kExactPlanTolerance);
  std::vector<Point> points;
  for (std::size_t k = 0; k < count; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(count);
    points.push_back(Point{std::cos(angle), std::sin(angle)});
  }
  const auto mu = share(uniform_measure(points));
  std::vector<CouplingEntry> entries;
  for (std::size_t k = 0; k < count; ++k) {
    entries.push_back({k, (k + step) % count, mu->weight(k)});
  }
  const Coupling plan(mu, mu, std::move(entries));
  const auto c = CostFunction::euclidean(2);
  const double chord =
      2.0 * std::sin(std::numbers::pi * static_cast<double>(step) / static_cast<double>(count));
  out.add_count("points", count);
  out.add_count("step", step);
  out.add("rotation_cost", chord);

  const auto im = check_IM(plan, c, tol);
  const auto icm = check_ICM_cycles(plan, c, tol);
  add_certificate_rows(out, "IM", im, plan);
  add_certificate_rows(out, "ICM", icm, plan);
  // Rotations by less than a quarter turn cannot be improved by one swap.
  if (4 * step < count) {
    out.require(im.pass, "IM", "witness " + describe_witness(im, plan));
  }
  out.require(!icm.pass, "ICM_fails", "no improving cycle found");
  if (!icm.pass) {
    out.add_count("witness_cycle_length", icm.witness.size());
    out.require(icm.permuted_max < icm.own_max - tol && witness_is_violation(icm, plan, c),
                "ICM_witness", "witness does not re-evaluate as a violation");
    out.require(std::abs(icm.own_max - chord) <= 1e-9, "witness_own_max",
                format_number(icm.own_max) + " != " + format_number(chord));
  }
  out.file("plan.csv", io::coupling_csv(plan));
  out.file("mu.csv", io::measure_csv(*mu));
}

// Scenario: grids on the unit square and its translate by (2, 0), Euclidean.
void run_monge_trend(const ExperimentConfig& config, Output& out) {
  const double tol = config.tolerance.value_or(kFlowPlanTolerance);
  const auto c = CostFunction::euclidean(2);
  std::string convergence = "n,p,C_p,gap_to_bottleneck\n";
  std::vector<double> masses;
  for (std::size_t n : config.resolutions) {
    const auto mu = share(grid_measure(Point{0.0, 0.0}, Point{1.0, 1.0}, n));
    const auto nu = share(grid_measure(Point{2.0, 0.0}, Point{3.0, 1.0}, n));
    const auto bottleneck = solve_bottleneck(mu, nu, c);
    const auto schedule = run_p_schedule(mu, nu, c, config.p_schedule, bottleneck.value);
    const auto map = extract_map(schedule.terminal_plan);
    const std::string tag = "_n" + std::to_string(n);
    out.add("bottleneck_value" + tag, bottleneck.value);
    out.add("terminal_value" + tag, schedule.solutions.back().value);
    out.add("nondeterministic_mass" + tag, map.nondeterministic_mass);
    convergence += convergence_rows(schedule, std::to_string(n) + ",");
    masses.push_back(map.nondeterministic_mass);
    if (n == config.resolutions.back()) {
      add_certificate_rows(out, "IM", check_IM(schedule.terminal_plan, c, tol),
                           schedule.terminal_plan);
      out.file("plan.csv", io::coupling_csv(schedule.terminal_plan));
      out.file("map.csv", io::map_csv(map, *mu));
    }
  }
  bool nonincreasing = true;
  for (std::size_t k = 1; k < masses.size(); ++k) {
    if (masses[k] > masses[k - 1] + 1e-12) nonincreasing = false;
  }
  out.require(nonincreasing, "mass_nonincreasing",
              "nondeterministic mass grew with the resolution");
  out.require(masses.back() <= 0.05, "mass_at_finest",
              format_number(masses.back()) + " > 0.05");
  out.file("convergence.csv", convergence);
}

// Scenario: half the target mass on an atom, two tie-break orders.
void run_uniqueness_atom(const ExperimentConfig& config, Output& out) {
  const std::size_t n = config.n;
  const double tol = config.tolerance.value_or(kFlowPlanTolerance);
  const auto c = CostFunction::euclidean(2);
  const auto mu = share(grid_measure(Point{0.0, 0.0}, Point{1.0, 1.0}, n));
  const auto grid = grid_measure(Point{2.0, 0.0}, Point{3.0, 1.0}, n);
  std::vector<Point> points{Point{2.5, 0.5}};
  std::vector<double> weights{0.5};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    points.push_back(grid.point(j));
    weights.push_back(0.5 * grid.weight(j));
  }
  const auto nu = share(make_measure(std::move(points), std::move(weights), true));
  const std::size_t atom = 0;

  const auto bottleneck = solve_bottleneck(mu, nu, c);
  const auto forward = run_p_schedule(mu, nu, c, config.p_schedule, bottleneck.value,
                                      {ArcOrder::kForward, true});
  const auto reversed = run_p_schedule(mu, nu, c, config.p_schedule, bottleneck.value,
                                       {ArcOrder::kReversed, true});
  const auto map = extract_map(forward.terminal_plan);
  const auto map_tilde = extract_map(reversed.terminal_plan);
  add_certificate_rows(out, "ICM_forward", check_ICM_cycles(forward.terminal_plan, c, tol),
                       forward.terminal_plan);
  add_certificate_rows(out, "ICM_reversed", check_ICM_cycles(reversed.terminal_plan, c, tol),
                       reversed.terminal_plan);

  const auto report = uniqueness_gap(map.assignment, map_tilde.assignment, atom, *mu, *nu);
  std::vector<std::size_t> region;
  for (std::size_t i = 0; i < mu->size(); ++i) {
    if (map.assignment[i] != map_tilde.assignment[i]) region.push_back(i);
  }
  const auto improved =
      improvement_region(region, map.assignment, map_tilde.assignment, c, *mu, *nu);
  std::vector<std::size_t> unimproved;
  std::set_difference(region.begin(), region.end(), improved.begin(), improved.end(),
                      std::back_inserter(unimproved));

  const double bound = 2.0 / static_cast<double>(n);
  out.add_count("n", n);
  out.add("bottleneck_value", bottleneck.value);
  out.add("terminal_value_forward", forward.solutions.back().value);
  out.add("terminal_value_reversed", reversed.solutions.back().value);
  out.add("nondeterministic_mass_forward", map.nondeterministic_mass);
  out.add("nondeterministic_mass_reversed", map_tilde.nondeterministic_mass);
  out.add("gap", report.gap);
  out.add("symmetric_gap", report.symmetric_gap);
  out.add("disagreement_mass", source_mass(region, *mu));
  out.add("unimproved_mass", source_mass(unimproved, *mu));
  out.add("gap_bound", bound);
  out.require(report.symmetric_gap <= bound, "symmetric_gap",
              format_number(report.symmetric_gap) + " > " + format_number(bound));

  std::string convergence = "order,p,C_p,gap_to_bottleneck\n";
  convergence += convergence_rows(forward, "forward,");
  convergence += convergence_rows(reversed, "reversed,");
  out.file("convergence.csv", convergence);
  out.file("plan.csv", io::coupling_csv(forward.terminal_plan));
  out.file("plan_reversed.csv", io::coupling_csv(reversed.terminal_plan));
  out.file("map.csv", io::map_csv(map, *mu));
  out.file("map_reversed.csv", io::map_csv(map_tilde, *mu));
  out.file("mu.csv", io::measure_csv(*mu));
  out.file("nu.csv", io::measure_csv(*nu));
}

ordered_json report_json(const ValidationReport& report) {
  ordered_json j;
  j["property"] = to_string(report.property);
  j["verdict"] = to_string(report.verdict);
  j["samples_tested"] = report.samples_tested;
  j["samples_skipped"] = report.samples_skipped;
  j["detail"] = report.detail;
  if (report.witness) {
    auto points = ordered_json::array();
    for (const auto& p : report.witness->points) {
      auto coords = ordered_json::array();
      for (double v : p.coords()) coords.push_back(io::round_to_reported(v));
      points.push_back(coords);
    }
    auto parameters = ordered_json::array();
    for (double v : report.witness->parameters) parameters.push_back(io::round_to_reported(v));
    j["witness"] = {{"points", points}, {"parameters", parameters}};
  }
  return j;
}

// Scenario: sampled checks of the cost assumptions.
void run_cost_validate(const ExperimentConfig& config, Output& out) {
  const std::size_t d = config.dim;
  const auto c = configured_cost(config, d);
  const Point origin(std::vector<double>(d, 0.0));
  std::mt19937_64 rng(config.seed);
  std::vector<Point> y_samples{origin};
  for (int k = 0; k < 4; ++k) {
    std::vector<double> y(d);
    for (double& v : y) v = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
    y_samples.emplace_back(std::move(y));
  }
  const std::vector<std::pair<std::string, ValidationReport>> reports{
      {"strict_quasiconvexity",
       check_strict_quasiconvexity(c, origin, config.trials, config.seed)},
      {"zero_set", check_zero_set(c, y_samples, config.seed).report},
      {"twist_kind", check_twist_kind(c, config.trials, config.seed)},
      {"sublevel_smoothness", sublevel_smoothness_probe(c, origin, 1.0, 720)},
  };
  out.add("cost", c.name());
  out.add_count("trials", config.trials);
  out.json()["validations"] = ordered_json::array();
  for (const auto& [key, report] : reports) {
    out.add(key, to_string(report.verdict));
    out.add_count(key + "_samples", report.samples_tested);
    out.add_count(key + "_skipped", report.samples_skipped);
    out.json()["validations"].push_back(report_json(report));
  }
  for (const auto& [key, expected] : config.expectations) {
    const auto it = std::find_if(reports.begin(), reports.end(),
                                 [&](const auto& r) { return r.first == key; });
    const bool failed = it->second.verdict == Verdict::kFail;
    out.require(failed == (expected == "fail"), "expect_" + key,
                "verdict " + to_string(it->second.verdict) + ", expected " + expected);
  }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  Output out(config);
  switch (config.scenario) {
    case Scenario::kBottleneck: run_bottleneck(config, out); break;
    case Scenario::kPSchedule: run_schedule(config, out); break;
    case Scenario::kCertify: run_certify(config, out); break;
    case Scenario::kCounterexample: run_counterexample(config, out); break;
    case Scenario::kRotation: run_rotation(config, out); break;
    case Scenario::kMongeTrend: run_monge_trend(config, out); break;
    case Scenario::kUniquenessAtom: run_uniqueness_atom(config, out); break;
    case Scenario::kCostValidate: run_cost_validate(config, out); break;
  }
  return out.write();
}

}  // namespace linfty::experiment
