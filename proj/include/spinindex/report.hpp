#pragma once

// Verification commands behind the CLI. Each returns an exit code, a JSON
// document and a human-readable rendering; verify_all aggregates them.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinindex/spectral.hpp"

namespace spinindex {

using ordered_json = nlohmann::ordered_json;

enum ExitCode : int {
  exit_pass = 0,
  exit_failed = 1,
  exit_usage = 2,
  exit_ambiguous = 3,
  exit_input = 4,
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CommandResult {
  int exit_code = exit_pass;
  ordered_json json = ordered_json::object();
  std::string text;
  /// Populated by spectral commands for CSV export.
  std::optional<SpectralSystem> spectrum;
};

/// Rounds to 12 significant digits so serialized reports are stable.
double round12(double v);

/// Runs `body`, mapping UsageError → 2, AmbiguityError → 3, curvature/parse
/// errors → 4 and anything else → 1, with the message in json["error"].
CommandResult guarded(const std::function<CommandResult()>& body);

ordered_json spectrum_to_json(const SpectralSystem& sys);
SpectralSystem spectrum_from_json(const ordered_json& j);

struct WittenSample {
  double tau;
  double value;
  /// Truncation tail bound; zero for complete spectra.
  double tail_bound;
};

struct VerificationReport {
  std::string case_name;
  int analytic_index = 0;
  int topological_index = 0;
  std::vector<WittenSample> witten_values;
  std::size_t pair_check_violations = 0;
  double plateau_deviation = 0.0;
  /// Pass when plateau_deviation ≤ plateau_allowance (per-τ allowance for
  /// truncated spectra is applied inside plateau_deviation).
  bool plateau_ok = true;
  bool pass = false;
  /// Stage name ↦ milliseconds; kept out of JSON unless requested.
  std::map<std::string, double> timings;
  /// Extra method-specific fields, appended to the JSON.
  ordered_json details = ordered_json::object();

  ordered_json to_json(bool with_timings = false) const;
};

inline const std::vector<double> default_tau_grid = {0.5, 1.0, 2.0, 5.0};

CommandResult cmd_algebra_check(int n);

struct TorusOptions {
  int N = 12;
  int q = 3;
  std::string method = "overlap";
  std::vector<double> taus = default_tau_grid;
  double mass = 1.0;
  bool with_timings = false;
};

CommandResult cmd_index_torus(const TorusOptions& options);

CommandResult cmd_index_sphere(int q, int k_max, const std::vector<double>& taus,
                               bool with_timings = false);

/// which ∈ {ahat, chern, density}; order is the grade cap (default 2n).
CommandResult cmd_characteristic(const std::string& path, const std::string& which,
                                 std::optional<int> order);

CommandResult cmd_genfun(const std::vector<double>& ys, const std::vector<int>& cutoffs);

CommandResult cmd_verify_all();

}  // namespace spinindex
