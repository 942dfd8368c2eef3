#ifndef FINSLERKIT_RUNNER_HPP
#define FINSLERKIT_RUNNER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "finslerkit/metric.hpp"

namespace finslerkit {

/// Metric section of a config: exactly one of the alternatives is set.
struct MetricConfig {
  enum class Kind { builtin, family, general, phi };

  Kind kind = Kind::builtin;
  std::string name;
  std::map<std::string, double> params;
  /// family: f, g, h, baseline; general: F; phi: phi.
  std::map<std::string, std::string> formulas;
  double domain_radius = kUnbounded;
  double abs_tol = 1e-12;
  int max_depth = 40;
};

struct CheckConfig {
  std::string name;
  std::map<std::string, double> params;
};

struct RunConfig {
  MetricConfig metric;
  int dimension = 2;
  int count = 500;
  std::uint64_t seed = 0;
  std::vector<CheckConfig> checks;
  /// Per-check tolerance overrides keyed by check name.
  std::map<std::string, double> tolerances;
};

/// Names accepted in "checks".
const std::vector<std::string>& check_names();

/// Default tolerance of a check.
double default_tolerance(const std::string& check);

/// Parses and validates a JSON config document. Throws ConfigError
/// (including expression parse failures, reported with their offset).
RunConfig parse_config(const std::string& json_text);

Metric build_metric(const MetricConfig& config, int dimension);

using DetailValue =
    std::variant<std::monostate, bool, double, std::string, std::vector<double>>;

struct CheckRecord {
  std::string check;
  std::string metric;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::vector<double> worst_x;
  std::vector<double> worst_y;
  bool pass = false;
  /// Check-specific fields in emission order.
  std::vector<std::pair<std::string, DetailValue>> details;
};

struct Report {
  std::string metric;
  int dimension = 0;
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<CheckRecord> records;
  /// True iff every record passes.
  bool pass = false;
};

struct RunOptions {
  /// Write one CSV per geodesic here when set.
  std::optional<std::string> dump_geodesics_dir;
};

/// Executes the checks in declared order over one deterministic sample set.
Report run(const RunConfig& config, const RunOptions& options = {});

/// Machine report: JSON, fixed key order, doubles with 17 significant digits.
std::string render_json(const Report& report);
/// Human report: aligned plain text.
std::string render_text(const Report& report);

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  bool json = false;
  std::optional<std::string> dump_geodesics_dir;
};

/// Loads `path`, applies overrides, runs, writes the report to `out` and
/// diagnostics to `err`. Returns 0 (all pass), 1 (a check failed) or 2
/// (config or parse error).
int run_config(const std::string& path, const CliOverrides& overrides,
               std::string& out, std::string& err);

}  // namespace finslerkit

#endif  // FINSLERKIT_RUNNER_HPP
