// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "linfty/bottleneck.hpp"
#include "linfty/cost_validation.hpp"
#include "linfty/experiment.hpp"
#include "linfty/io.hpp"
#include "linfty/mapping.hpp"
#include "linfty/monotonicity.hpp"
#include "linfty/pnorm.hpp"
#include "oracles.hpp"

using namespace linfty;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleEquality = 1e-12;
constexpr double kCounterexampleTol = 1e-9;
constexpr double kRotationTol = 1e-9;
constexpr double kScheduleRelative = 0.02;
constexpr double kMongeMass = 0.05;
constexpr double kUniquenessBound = 2.0 / 8.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) { return io::format_number(v); }

// Runs a scenario through the experiment pipeline and returns its summary rows.
std::map<std::string, std::string> run_scenario(const std::string& config_json,
                                                const std::string& name, int& exit_code) {
  const auto dir = fs::temp_directory_path() / ("linfty_acceptance_" + name);
  fs::remove_all(dir);
  auto config = experiment::parse_config_json(nlohmann::json::parse(config_json), dir);
  exit_code = experiment::run_experiment(config).exit_code;
  std::map<std::string, std::string> rows;
  std::istringstream in(io::read_file(config.output_dir / "summary.csv"));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    rows[line.substr(a + 1, b - a - 1)] = line.substr(b + 1);
  }
  return rows;
}

double number(const std::map<std::string, std::string>& rows, const std::string& key) {
  const auto it = rows.find(key);
  if (it == rows.end()) throw std::runtime_error("summary lacks " + key);
  return std::stod(it->second);
}

Coupling column_spread(std::size_t n) {
  const auto mu = share(grid_measure(Point{0.0, 0.0}, Point{1.0, 1.0}, n));
  const auto nu = share(grid_measure(Point{10.0, 0.0}, Point{11.0, 1.0}, n));
  std::vector<CouplingEntry> entries;
  for (std::size_t i = 0; i < mu->size(); ++i)
    for (std::size_t b = 0; b < n; ++b)
      entries.push_back({i, (i / n) * n + b, mu->weight(i) / static_cast<double>(n)});
  return Coupling(mu, nu, std::move(entries));
}

Outcome bottleneck_oracle() {
  Outcome out;
  std::mt19937_64 rng(1);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 7;
    const auto mu = share(uniform_measure(oracle::random_points(rng, n, 2)));
    const auto nu = share(uniform_measure(oracle::random_points(rng, n, 2)));
    const auto c = t % 2 ? CostFunction::sup_norm(2) : CostFunction::euclidean(2);
    const auto costs = compute_cost_matrix(*mu, *nu, c);
    const double fast = solve_bottleneck(mu, nu, costs).value;
    const double slow = brute_force_bottleneck(*mu, *nu, costs);
    if (std::abs(fast - slow) > kOracleEquality) ++mismatches;
  }
  out.expect(mismatches == 0, std::to_string(mismatches) + " of 200 instances differ");
  return out;
}

Outcome counterexample() {
  Outcome out;
  const auto plan = column_spread(6);
  const auto c = CostFunction::sup_norm(2);
  const double value = solve_bottleneck(plan.source_ptr(), plan.target_ptr(), c).value;
  out.expect(std::abs(value - 10.0) <= kCounterexampleTol, "value " + fmt(value));
  const auto im = check_IM(plan, c, kCounterexampleTol);
  const auto icm = check_ICM_cycles(plan, c, kCounterexampleTol);
  out.expect(im.pass, "column-spread plan fails IM");
  out.expect(icm.pass, "column-spread plan fails ICM");
  const double mass = extract_map(plan).nondeterministic_mass;
  out.expect(std::abs(mass - 5.0 / 6.0) <= kCounterexampleTol, "nondeterministic mass " + fmt(mass));
  return out;
}

Outcome rotation() {
  Outcome out;
  std::vector<Point> pts;
  for (int k = 0; k < 12; ++k) {
    const double a = std::numbers::pi * k / 6.0;
    pts.push_back(Point{std::cos(a), std::sin(a)});
  }
  const auto mu = share(uniform_measure(pts));
  std::vector<CouplingEntry> entries;
  for (std::size_t k = 0; k < 12; ++k) entries.push_back({k, (k + 1) % 12, 1.0 / 12.0});
  const Coupling plan(mu, mu, entries);
  const auto c = CostFunction::euclidean(2);
  const double chord = 2.0 * std::sin(std::numbers::pi / 12.0);
  out.expect(check_IM(plan, c, kRotationTol).pass, "IM fails");
  const auto icm = check_ICM_cycles(plan, c, kRotationTol);
  out.expect(!icm.pass, "ICM passes");
  if (!icm.pass) {
    out.expect(witness_is_violation(icm, plan, c), "witness does not re-evaluate");
    out.expect(std::abs(icm.permuted_max) <= kRotationTol,
               "permuted max " + fmt(icm.permuted_max));
    out.expect(std::abs(icm.own_max - chord) <= kRotationTol, "own max " + fmt(icm.own_max));
  }
  return out;
}

Outcome icm_oracle() {
  Outcome out;
  std::mt19937_64 rng(4);
  int disagreements = 0, failing = 0;
  for (int t = 0; t < 200; ++t) {
    const auto rp = oracle::random_plan(rng, 2 + rng() % 6, t % 3 == 0);
    const Coupling plan(rp.mu, rp.nu, rp.entries);
    const auto c = t % 2 ? CostFunction::sup_norm(2) : CostFunction::euclidean(2);
    const bool fast = check_ICM_cycles(plan, c).pass;
    const bool slow = brute_force_ICM(plan, c, plan.support_size()).pass;
    disagreements += fast != slow;
    failing += !fast;
  }
  out.expect(disagreements == 0, std::to_string(disagreements) + " disagreements");
  out.detail += (out.detail.empty() ? "" : "; ") + std::to_string(failing) + "/200 not ICM";
  return out;
}

Outcome p_schedule() {
  Outcome out;
  std::mt19937_64 rng(5);
  const auto c = CostFunction::euclidean(2);
  int im_pass = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto mu = share(uniform_measure(oracle::random_points(rng, 30, 2)));
    const auto nu = share(uniform_measure(oracle::random_points(rng, 30, 2)));
    const double lambda = solve_bottleneck(mu, nu, c).value;
    const auto s = run_p_schedule(mu, nu, c, default_p_schedule(), lambda);
    const std::string tag = "instance " + std::to_string(t) + ": ";
    out.expect(s.values_nondecreasing, tag + "values decrease");
    out.expect(s.values_bounded, tag + "value above lambda*");
    const double gap = (lambda - s.solutions.back().value) / lambda;
    worst_gap = std::max(worst_gap, gap);
    out.expect(gap <= kScheduleRelative, tag + "terminal gap " + fmt(gap));
    const auto im = check_IM(s.terminal_plan, c, kFlowPlanTolerance);
    if (im.pass) {
      ++im_pass;
    } else {
      const auto& a = s.terminal_plan.entries()[im.witness[0]];
      const auto& b = s.terminal_plan.entries()[im.witness[1]];
      std::printf("  instance %d: terminal plan not IM, witness (%zu,%zu) (%zu,%zu)\n", t, a.i,
                  a.j, b.i, b.j);
    }
  }
  out.expect(im_pass >= 19, "terminal IM on " + std::to_string(im_pass) + "/20");
  out.detail += (out.detail.empty() ? "" : "; ") + std::string("IM ") + std::to_string(im_pass) +
                "/20, worst gap " + fmt(worst_gap);
  return out;
}

Outcome monge_trend() {
  Outcome out;
  int code = 0;
  const auto rows = run_scenario(R"({"scenario": "monge-trend", "resolutions": [4, 8, 16]})",
                                 "monge", code);
  double previous = 1.0;
  for (int n : {4, 8, 16}) {
    const double m = number(rows, "nondeterministic_mass_n" + std::to_string(n));
    out.expect(m <= previous + 1e-12, "mass grew at n=" + std::to_string(n));
    previous = m;
    out.detail += (out.detail.empty() ? "" : "; ") + ("n=" + std::to_string(n) + " mass " + fmt(m));
  }
  out.expect(previous <= kMongeMass, "mass at n=16 above 0.05");
  out.expect(code == 0, "scenario exit " + std::to_string(code));
  return out;
}

Outcome validators() {
  Outcome out;
  const auto e = CostFunction::euclidean(2);
  const Point origin{0.0, 0.0};
  const auto sq = check_strict_quasiconvexity(e, origin, 1000, 71);
  out.expect(sq.verdict != Verdict::kFail && !sq.witness, "euclidean strict quasiconvexity");
  std::mt19937_64 rng(72);
  const auto zs = check_zero_set(e, oracle::random_points(rng, 20, 2, -1.0, 1.0), 73);
  out.expect(zs.report.verdict == Verdict::kInconclusivePass && !zs.report.witness,
             "euclidean zero set");
  const auto tw = check_twist_kind(e, 1000, 74);
  out.expect(tw.verdict == Verdict::kInconclusivePass && !tw.witness, "euclidean twist");

  const auto sup = CostFunction::sup_norm(2);
  const double facet = quasiconvexity_violation(sup, origin.coords(), Point{1.0, 0.0}.coords(),
                                                Point{1.0, 0.5}.coords(), 0.5);
  out.expect(facet >= -kQuasiconvexityTolerance, "flat facet (1,0)-(1,0.5) not flagged");
  const auto ssq = check_strict_quasiconvexity(sup, origin, 1000, 75);
  out.expect(ssq.verdict == Verdict::kFail && ssq.witness, "sup strict quasiconvexity passes");
  if (ssq.witness) {
    const auto& w = *ssq.witness;
    out.expect(quasiconvexity_violation(sup, w.points[0].coords(), w.points[1].coords(),
                                        w.points[2].coords(), w.parameters[0]) >=
                   -kQuasiconvexityTolerance,
               "sup witness does not re-evaluate");
    // On a flat facet both endpoints sit on the same level set as the midpoint.
    const double cx = sup(w.points[1].coords(), w.points[0].coords());
    const double cb = sup(w.points[2].coords(), w.points[0].coords());
    out.expect(std::abs(cx - cb) <= 1e-9 * (1.0 + cx), "sup witness endpoints off one level");
    out.detail += (out.detail.empty() ? "" : "; ") +
                  ("sup witness x=(" + fmt(w.points[1][0]) + "," + fmt(w.points[1][1]) +
                   ") x_bar=(" + fmt(w.points[2][0]) + "," + fmt(w.points[2][1]) + ")");
  }
  const auto smooth = sublevel_smoothness_probe(sup, origin, 1.0, 720);
  out.expect(smooth.verdict == Verdict::kFail && smooth.witness, "sup smoothness passes");
  if (smooth.witness) {
    const auto& p = smooth.witness->points[1];
    out.expect(std::abs(std::abs(p[0]) - 1.0) <= 0.02 && std::abs(std::abs(p[1]) - 1.0) <= 0.02,
               "sup kink not at a corner");
  }
  return out;
}

Outcome uniqueness() {
  Outcome out;
  int code = 0;
  const auto rows = run_scenario(R"({"scenario": "uniqueness-atom", "n": 8})", "atom", code);
  const double gap = number(rows, "symmetric_gap");
  out.expect(gap <= kUniquenessBound, "symmetric gap " + fmt(gap));
  out.expect(code == 0, "scenario exit " + std::to_string(code));
  out.detail += (out.detail.empty() ? "" : "; ") + ("symmetric gap " + fmt(gap));
  return out;
}

Outcome rescaling() {
  Outcome out;
  std::mt19937_64 rng(9);
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const auto c = t % 2 ? CostFunction::sup_norm(2) : CostFunction::euclidean(2);
    const auto c2 = c.squared();
    const auto rp = oracle::random_plan(rng, 2 + rng() % 6, t % 3 == 0);
    const Coupling plan(rp.mu, rp.nu, rp.entries);
    bool same = true;
    for (auto check : {&check_IM, &check_ICM_cycles}) {
      const auto a = check(plan, c, 0.0), b = check(plan, c2, 0.0);
      same = same && a.pass == b.pass && a.witness == b.witness;
    }
    const std::size_t n = 2 + rng() % 6;
    const auto mu = share(uniform_measure(oracle::random_points(rng, n, 2)));
    const auto nu = share(uniform_measure(oracle::random_points(rng, n, 2)));
    const auto m = compute_cost_matrix(*mu, *nu, c), m2 = compute_cost_matrix(*mu, *nu, c2);
    const double lambda = solve_bottleneck(mu, nu, m).value;
    const double lambda2 = solve_bottleneck(mu, nu, m2).value;
    same = same && std::abs(lambda2 - lambda * lambda) <= kOracleEquality * (1.0 + lambda2);
    same = same && threshold_edges(m, lambda) == threshold_edges(m2, lambda2);
    mismatches += !same;
  }
  out.expect(mismatches == 0, std::to_string(mismatches) + " of 50 instances changed");
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"bottleneck equals permutation oracle (200 instances)", 10.0, bottleneck_oracle},
      {"sup-norm counterexample: value 10, IM+ICM plan, mass 5/6", 5.0, counterexample},
      {"twelve-point rotation: IM but not ICM", 1.0, rotation},
      {"cycle criterion equals subset enumeration (200 couplings)", 60.0, icm_oracle},
      {"p-schedule on 20 instances n=30", 120.0, p_schedule},
      {"translation Monge trend n=4,8,16", 120.0, monge_trend},
      {"cost validators: euclidean passes, sup-norm fails", 30.0, validators},
      {"atom uniqueness gap n=8", 60.0, uniqueness},
      {"invariance under squaring the cost (50 instances)", 30.0, rescaling},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto& cr = criteria[k];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.expect(seconds < cr.budget_seconds,
               "took " + fmt(seconds) + " s, budget " + fmt(cr.budget_seconds) + " s");
    failed += !out.pass;
    std::printf("%s %zu %s (%.2f s)%s%s\n", out.pass ? "PASS" : "FAIL", k + 1, cr.name, seconds,
                out.detail.empty() ? "" : ": ", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
