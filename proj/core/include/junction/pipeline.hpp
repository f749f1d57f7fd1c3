#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "junction/oracle.hpp"
#include "junction/problem.hpp"
#include "junction/solver.hpp"
#include "junction/trajectory.hpp"
#include "junction/verify.hpp"

namespace junction {

/// Malformed or schema-invalid run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigSchemaVersion = 1;

enum class Stage { solve, verify, oracle_compare, brute_force_compare, simulate, export_field };

const char* to_string(Stage s);

struct VerifyStageConfig {
  double kink_curvature = kDefaultKinkCurvature;
  /// When set, the interior viscosity residual becomes a pass/fail check.
  std::optional<double> max_interior_residual;
  double lipschitz_band = 0.5;
};

struct OracleStageConfig {
  double tolerance = 2e-2;
  /// Empty means the default lattice.
  std::vector<JunctionPoint> points;
};

struct BruteForceStageConfig {
  std::vector<JunctionPoint> points;
  std::size_t segments = 2;
  double horizon = 40.0;
  double duration_step = 0.05;
  double duration_max = 6.0;
  double dt_int = 0.05;
  double tolerance = 5e-2;
};

struct NamedSegment {
  double duration;
  std::size_t branch;
  std::string control;
};

struct SimulateStageConfig {
  JunctionPoint start;
  double dt_int = 0.01;
  /// Open-loop schedule; when empty the solved field's policy is rolled out
  /// for `policy_horizon`.
  std::vector<NamedSegment> schedule;
  double policy_horizon = 8.0;
};

/// Parsed run configuration (JSON, see README for the schema).
struct RunConfig {
  std::string name;
  std::optional<ProblemSpec> problem;
  /// Set when the problem is the built-in two-half-plane benchmark.
  std::optional<ExampleRegime> example;
  GridSpec grid;
  double tol = 1e-6;
  std::size_t max_iter = 20000;
  std::vector<Stage> pipeline;
  VerifyStageConfig verify;
  OracleStageConfig oracle;
  std::optional<BruteForceStageConfig> brute_force;
  std::optional<SimulateStageConfig> simulate;
};

/// Throws ConfigError on malformed input or broken stage prerequisites.
RunConfig parse_config(const std::string& json_text);
/// `source` is a file path or the name of a built-in configuration.
RunConfig load_config(const std::string& source);

std::vector<std::string> builtin_config_names();
/// Throws ConfigError for an unknown name.
std::string builtin_config_text(const std::string& name);

/// Throws ConfigError when a stage precedes its prerequisites.
void validate_pipeline(const std::vector<Stage>& stages);

struct OracleRow {
  JunctionPoint point;
  double solver;
  double oracle;
  double error;
};

struct OracleComparison {
  std::vector<OracleRow> rows;
  double max_error = 0.0;
  double mean_error = 0.0;
};

/// 21 x 21 lattice per branch, kept 1.5 away from the truncation boundary
/// and 2h away from the |x0| = 1 seams of the benchmark.
std::vector<JunctionPoint> default_oracle_lattice(const GridSpec& grid, std::size_t n_branches = 2);

/// Throws std::invalid_argument when the problem is not the benchmark for
/// this regime.
OracleComparison compare_to_oracle(const ProblemSpec& spec, const GridSpec& grid, const ValueField& field,
                                   const ExampleRegime& regime, const std::vector<JunctionPoint>& points);

/// CSV with columns branch,xi,x0,value; u_gamma rows have branch 0, xi 0.
void write_value_field_csv(std::ostream& os, const GridSpec& grid, const ValueField& field);

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  /// Overrides the configuration's pipeline when set.
  std::optional<std::vector<Stage>> stages;
};

struct RunOutcome {
  int exit_code = 0;
  std::vector<CheckResult> checks;
  std::filesystem::path summary_path;
  std::optional<SolveResult> solution;
};

/// Executes the stages in order, writing artifacts to options.out_dir.
/// Exit code 0 iff every check passed, 1 otherwise.
RunOutcome run(const RunConfig& config, const RunOptions& options);

/// Loads and runs; parse errors give exit code 2.
int run(const std::string& source, const RunOptions& options, std::ostream& log);

}  // namespace junction
