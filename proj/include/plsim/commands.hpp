#pragma once

// Command implementations behind the plsim executable. Each returns a
// process exit status:
//   0 success, 1 failed check / blow-up / failed assertion,
//   2 invalid configuration or arguments, 3 I/O or format error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "plsim/bound_checks.hpp"
#include "plsim/config.hpp"
#include "plsim/time_integrators.hpp"

namespace plsim {

enum ExitStatus : int {
  kExitOk = 0,
  kExitFailed = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool assert_mode = false;
};

/// Reads a config from a path or "builtin:NAME". Prints every violation and
/// warning to `log`; returns nullopt when the document is invalid or the
/// built-in name is unknown. Throws std::runtime_error if the file cannot
/// be read.
std::optional<RunConfig> load_config(const std::string& source, std::ostream& log);

/// Applies --seed and --out to a parsed config.
RunConfig apply_overrides(RunConfig c, const CommonOptions& o);

/// Runs every configured check on a diagnostics series (all checks of the
/// model when the list is empty).
std::vector<CheckReport> run_checks(const RunConfig& c, const DiagnosticsSeries& d);

struct RunOutcome {
  int exit_status = kExitOk;
  DiagnosticsSeries diagnostics;
  std::vector<CheckReport> reports;
  std::optional<BlowUpEvent> blow_up;
  std::vector<std::filesystem::path> checkpoints;
};

/// Simulates, writes diagnostics.csv, reports.json, run.json and
/// checkpoints under the output directory, guarded by a lock file.
RunOutcome run_simulation(const RunConfig& c, std::ostream& log);

int run_command(const RunConfig& c, std::ostream& log);

/// Re-runs the configured checks on a stored diagnostics CSV.
int check_command(const RunConfig& c, const std::filesystem::path& csv,
                  std::ostream& log);

struct PicardCommandOptions {
  double delta = 0.05;
  std::size_t n_nodes = 33;
  std::size_t max_iter = 60;
  double s = 1.0;
  bool bisect = false;
};

int picard_command(const RunConfig& c, const PicardCommandOptions& p,
                   bool assert_mode, std::ostream& log);

struct NormsCommandOptions {
  std::vector<std::filesystem::path> checkpoints;
  double s = 0.0;
  double b = 0.375;
  bool l4_scan = false;
  std::size_t l4_samples = 200;
  bool trilinear = false;
  std::size_t trilinear_samples = 20;
  double eps = 0.05;
  std::filesystem::path out_dir = "plsim_out";
  std::uint64_t seed = 7;
};

int norms_command(const NormsCommandOptions& n, bool assert_mode, std::ostream& log);

int selftest_command(bool assert_mode, std::ostream& log);

}  // namespace plsim
