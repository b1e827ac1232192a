#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "linfty/costs.hpp"
#include "linfty/measures.hpp"

namespace linfty::experiment {

/// Invalid or unreadable configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario {
  kBottleneck,
  kPSchedule,
  kCertify,
  kCounterexample,
  kRotation,
  kMongeTrend,
  kUniquenessAtom,
  kCostValidate,
};

std::string to_string(Scenario scenario);
Scenario parse_scenario(const std::string& name);

/// Cost family plus parameters. Families: "euclidean", "sup",
/// "power" (h(y - x) = |y - x|^exponent), "affine" (h(A y + b - x) with
/// h = |.|^exponent).
struct CostSpec {
  std::string family = "euclidean";
  double exponent = 2.0;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
};

CostSpec parse_cost_json(const nlohmann::json& j, const std::string& context = "cost");
/// "euclidean", "sup", "power:q", or an inline JSON object.
CostSpec parse_cost_spec(const std::string& text);
CostFunction make_cost(const CostSpec& spec, std::size_t dim);

struct MeasureSpec {
  enum class Kind { kGrid, kCsv, kPoints, kRandom };
  Kind kind = Kind::kGrid;
  Point lower{0.0};
  Point upper{1.0};
  std::size_t n = 0;
  std::size_t dim = 2;
  std::filesystem::path csv;
  std::vector<Point> points;
  std::vector<double> weights;
};

MeasureSpec parse_measure_json(const nlohmann::json& j, const std::string& context,
                               const std::filesystem::path& base_dir);
/// Random specs draw from the seed (salted per measure).
MeasurePtr build_measure(const MeasureSpec& spec, std::uint64_t seed);

struct ExperimentConfig {
  Scenario scenario = Scenario::kBottleneck;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::optional<MeasureSpec> mu;
  std::optional<MeasureSpec> nu;
  CostSpec cost;
  std::filesystem::path plan_csv;
  std::vector<double> p_schedule;
  /// Certificate tolerance; scenario default when absent.
  std::optional<double> tolerance;
  /// Grid resolution for the built-in scenarios.
  std::size_t n = 0;
  std::vector<std::size_t> resolutions;
  std::size_t points = 12;
  std::size_t step = 1;
  std::size_t trials = 1000;
  /// Dimension for cost-validate.
  std::size_t dim = 2;
  /// certify: "none", "IM" or "ICM".
  std::string expect = "ICM";
  /// cost-validate: property name -> expected "pass" / "fail".
  std::vector<std::pair<std::string, std::string>> expectations;
};

/// Reads and validates a JSON config; throws ConfigError.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_json(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir);

struct RunResult {
  /// 0 success, 2 when a built-in assertion failed.
  int exit_code = 0;
  std::vector<std::string> failures;
  std::vector<std::filesystem::path> files;
};

/// Runs one scenario and writes its reports into config.output_dir.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace linfty::experiment
