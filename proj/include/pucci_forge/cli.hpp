// Command-line front end. Options come from flags and an optional JSON
// config file with the same keys (flag names without the leading dashes);
// flags win. The resolved configuration is embedded in every report, and
// running it again reproduces the report's results.
//
// Exit status: 0 verification passed or campaign bounded, 1 violation or
// divergence found, 2 usage error.

#ifndef PUCCI_FORGE_CLI_HPP
#define PUCCI_FORGE_CLI_HPP

#include <optional>
#include <string>
#include <vector>

#include "pucci_forge/report.hpp"

namespace pucci {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

inline constexpr double kResidualTolerance = 1e-9;
/// Window used by reconstruct-f without --lambda/--Lambda: (1/14, 14).
inline constexpr double kDefaultRatioBound = 14.0;

struct RunConfig {
  std::string command;
  std::optional<std::string> candidate;
  double alpha = 1.0;
  std::optional<double> lambda, Lambda;
  bool auto_window = false;
  int grid_n = kDefaultGridN;
  CampaignConfig campaign;
  std::string out;
  std::string trace;
  std::string sample_cache;
  int points = 1000;
  double h = 1e-5;
  int samples = kDefaultSampleSize;
  int queries = 20;
  int trials = 20;

  /// Every field as a JSON object keyed like the flags.
  Json to_json() const;
};

/// Builds a RunConfig from a JSON object with flag-named keys; missing keys
/// keep their defaults. Throws InvalidInput naming the offending field.
RunConfig config_from_json(const Json& j);

/// Usage errors carry the message to print; help requests carry the help text.
struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = kExitPass;
  std::string message;
};

ParseResult parse_command_line(const std::vector<std::string>& args);

struct RunResult {
  int exit_code = kExitPass;
  Json report;
};

/// Executes the command. Errors in the inputs (bad candidate for the command,
/// out-of-range values) give exit 2 with an "error" entry in the report.
RunResult run(const RunConfig& cfg);

/// Parses, runs and writes the report to cfg.out (stdout when empty).
int main_entry(const std::vector<std::string>& args);

}  // namespace pucci

#endif  // PUCCI_FORGE_CLI_HPP
