#pragma once
// Experiment drivers behind the command-line tool. Each command returns its
// tables; writing them out is left to the caller.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lilklucb/confidence.hpp"
#include "lilklucb/data_ingest.hpp"
#include "lilklucb/environments.hpp"

namespace lilklucb {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { simulate, replay, identify, table1, coverage };

[[nodiscard]] std::string_view command_name(Command c) noexcept;

struct RunConfig {
  Command command = Command::simulate;
  std::vector<SchemeKind> schemes;
  int bound_n = 8;
  double delta = 0.01;
  std::vector<int> n;          // table1 takes several, other commands at most one
  std::vector<double> alpha;   // same
  std::vector<double> mus;     // explicit means (identify, coverage)
  std::optional<std::uint64_t> budget;
  std::uint64_t reps = 250;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> snapshot_every;
  int grid_points = 64;
  std::string input;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  unsigned parallel = 1;
  ColumnMap columns;
  StarMap star_map = kDefaultStarMap;
};

/// Option names accepted by config_from_options, without leading dashes.
[[nodiscard]] const std::vector<std::string>& option_names();

/// Builds and validates a config from textual option values. Lists are
/// comma-separated. Throws ConfigError with a one-line message on an unknown
/// option, a malformed value, or a value outside its allowed range.
[[nodiscard]] RunConfig config_from_options(Command command,
                                            const std::map<std::string, std::string>& options);

/// Re-checks every constraint; throws ConfigError.
void validate(const RunConfig& config);

/// One output table and the tag used to tell several apart (usually the
/// scheme name; empty when a command produces a single table).
struct NamedOutput {
  std::string tag;
  ExperimentOutput table;
};

/// Membership curves of ucb_race, one table per scheme.
[[nodiscard]] std::vector<NamedOutput> cmd_simulate(const RunConfig& config);
/// As cmd_simulate on bootstrap arms built from a contest file.
[[nodiscard]] std::vector<NamedOutput> cmd_replay(const RunConfig& config);
/// lil-KLUCB runs summarized per arm, with the predicted bound in metadata.
[[nodiscard]] std::vector<NamedOutput> cmd_identify(const RunConfig& config);
/// Hardness sums over an (n, alpha) grid with fitted log-log slopes.
[[nodiscard]] std::vector<NamedOutput> cmd_table1(const RunConfig& config);
/// Anytime violation frequencies of the confidence sequences, one table per
/// scheme.
[[nodiscard]] std::vector<NamedOutput> cmd_coverage(const RunConfig& config);

[[nodiscard]] std::vector<NamedOutput> run_command(const RunConfig& config);

struct HardnessSums {
  double s_kl = 0.0;  // sum_{i>=2} 1 / D*(mu_i, mu_1)
  double s_sg = 0.0;  // sum_{i>=2} 1 / Delta_i^2
};

/// Sums for mu_1 = 1 and mu_i = 1 - Delta_i with Delta_i = (i/n)^alpha.
[[nodiscard]] HardnessSums hardness_sums(int n, double alpha);

/// Least-squares slope of log y against log x; needs at least 2 points with
/// positive coordinates.
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs body(i) for i in [0, count) on up to `threads` threads. The first
/// exception thrown by any call is rethrown after all threads finish.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& body);

}  // namespace lilklucb
