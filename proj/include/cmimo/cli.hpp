#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "cmimo/capacity.hpp"

namespace cmimo {

enum class Command { Capacity, Minmax, Bounds, Verify, Counterexample, Sweep };

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  double at(int k) const;
};

struct RunConfig {
  Command command = Command::Capacity;
  std::string input;
  double gamma = 1.0;
  double epsilon = 0.0;
  NormKind norm = NormKind::Spectral;
  std::optional<PowerConstraint> constraint;  // default: sum-power with budget t
  std::string output;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  bool bits = false;
  bool table = false;
  GridAxis epsilon_axis;
  GridAxis gamma_axis;
  std::size_t search_trials = 0;  // counterexample: optional lemma search
  NormKind search_norm = NormKind::Frobenius;
  int search_rows = 2;
  int search_cols = 2;
  double grid_step = 1e-3;
  int threads = 0;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNoConvergence = 2,
  kExitVerificationFailed = 3,
};

struct RunResult {
  int exit_code = kExitOk;
  std::string report;  // machine-readable JSON, empty on error
  std::string table;   // plain rendering
  std::string error;   // one-line message on failure
};

/// "sum", "sum:B" or "max:C". "sum" alone means a budget of `default_budget`.
PowerConstraint parse_constraint(std::string_view text, double default_budget);

/// "lo:hi:steps".
GridAxis parse_axis(std::string_view text, std::string_view field);

/// Executes one command. Library errors come back as exit codes, never as
/// exceptions.
RunResult run(const RunConfig& config);

/// argv front end used by the compound-mimo executable.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmimo
