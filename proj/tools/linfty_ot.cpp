// linfty-ot: run experiment configs, certify plans, solve transport problems.
//
// Exit status: 0 success, 1 configuration or input error, 2 a check failed.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "linfty/bottleneck.hpp"
#include "linfty/experiment.hpp"
#include "linfty/io.hpp"
#include "linfty/monotonicity.hpp"
#include "linfty/pnorm.hpp"

namespace {

using namespace linfty;

int run_command(const std::string& config_path, const std::optional<std::string>& out_dir,
                const std::optional<std::uint64_t>& seed) {
  auto config = experiment::parse_config(config_path);
  if (out_dir) config.output_dir = *out_dir;
  if (seed) config.seed = *seed;
  const auto result = experiment::run_experiment(config);
  for (const auto& f : result.files) std::cout << f.string() << "\n";
  for (const auto& failure : result.failures) std::cerr << "check failed: " << failure << "\n";
  return result.exit_code;
}

std::pair<MeasurePtr, MeasurePtr> load_measures(const std::string& mu_path,
                                                const std::string& nu_path) {
  MeasurePtr mu;
  MeasurePtr nu;
  try {
    mu = io::read_measure_csv(mu_path);
    nu = io::read_measure_csv(nu_path);
  } catch (const std::exception& e) {
    throw experiment::ConfigError(e.what());
  }
  if (mu->dim() != nu->dim()) throw experiment::ConfigError("measures differ in dimension");
  return {mu, nu};
}

CostFunction load_cost(const std::string& spec, std::size_t dim) {
  try {
    return experiment::make_cost(experiment::parse_cost_spec(spec), dim);
  } catch (const std::invalid_argument& e) {
    throw experiment::ConfigError(std::string("cost: ") + e.what());
  }
}

int certify_command(const std::string& plan_path, const std::string& mu_path,
                    const std::string& nu_path, const std::string& cost_spec, double tol) {
  const auto [mu, nu] = load_measures(mu_path, nu_path);
  const auto c = load_cost(cost_spec, mu->dim());
  std::optional<Coupling> plan;
  try {
    plan.emplace(io::read_coupling_csv(plan_path, mu, nu));
  } catch (const std::exception& e) {
    throw experiment::ConfigError(std::string("plan: ") + e.what());
  }
  const auto check = validate_coupling(*plan);
  const auto im = check_IM(*plan, c, tol);
  const auto icm = check_ICM_cycles(*plan, c, tol);
  nlohmann::ordered_json report;
  report["marginals"] = check.pass ? "pass" : "fail";
  report["marginal_deviation"] = io::round_to_reported(check.max_deviation());
  report["certificates"] = {io::certificate_json(im, *plan), io::certificate_json(icm, *plan)};
  std::cout << report.dump(2) << "\n";
  return check.pass && im.pass && icm.pass ? 0 : 2;
}

int solve_command(const std::string& mu_path, const std::string& nu_path,
                  const std::string& cost_spec, const std::optional<double>& p,
                  const std::optional<std::string>& out_dir) {
  const auto [mu, nu] = load_measures(mu_path, nu_path);
  const auto c = load_cost(cost_spec, mu->dim());
  std::optional<Coupling> plan;
  double value = 0.0;
  if (p) {
    auto sol = solve_p(mu, nu, c, *p);
    value = sol.value;
    plan.emplace(std::move(sol.plan));
  } else {
    auto sol = solve_bottleneck(mu, nu, c);
    value = sol.value;
    plan.emplace(std::move(sol.plan));
  }
  const std::string summary = "problem,value\n" +
                              (p ? "p=" + io::format_number(*p) : std::string("bottleneck")) +
                              "," + io::format_number(value) + "\n";
  if (out_dir) {
    io::write_file_atomic(std::filesystem::path(*out_dir) / "summary.csv", summary);
    io::write_file_atomic(std::filesystem::path(*out_dir) / "plan.csv", io::coupling_csv(*plan));
  } else {
    std::cout << summary << "\n" << io::coupling_csv(*plan);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottleneck (L-infinity) optimal transport solver and certifier"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "RNG seed (overrides the config)");

  std::string plan_path, mu_path, nu_path, cost_spec;
  double tol = kFlowPlanTolerance;
  auto* certify = app.add_subcommand("certify", "Certify IM/ICM of a plan");
  certify->add_option("plan", plan_path, "Plan CSV (i,j,mass)")->required();
  certify->add_option("mu", mu_path, "Source measure CSV")->required();
  certify->add_option("nu", nu_path, "Target measure CSV")->required();
  certify->add_option("--cost", cost_spec, "euclidean, sup, power:q or JSON")->required();
  certify->add_option("--tol", tol, "Strictness tolerance")->check(CLI::NonNegativeNumber);

  std::optional<double> p;
  bool bottleneck = false;
  std::optional<std::string> solve_out;
  auto* solve = app.add_subcommand("solve", "Solve the bottleneck or a p-problem");
  solve->add_option("mu", mu_path, "Source measure CSV")->required();
  solve->add_option("nu", nu_path, "Target measure CSV")->required();
  solve->add_option("--cost", cost_spec, "euclidean, sup, power:q or JSON")->required();
  auto* p_opt = solve->add_option("--p", p, "Exponent of the p-problem");
  auto* b_opt = solve->add_flag("--bottleneck", bottleneck, "Solve the bottleneck problem");
  p_opt->excludes(b_opt);
  solve->add_option("--out", solve_out, "Write summary.csv and plan.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_command(config_path, out_dir, seed);
    if (*certify) return certify_command(plan_path, mu_path, nu_path, cost_spec, tol);
    if (*solve) return solve_command(mu_path, nu_path, cost_spec, p, solve_out);
  } catch (const experiment::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
