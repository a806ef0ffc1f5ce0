#pragma once

// The acceptance suite: eleven end-to-end criteria with fixed seeds,
// tolerances and runtime limits. Shared by `plsim selftest` and the
// plsim_acceptance binary.

#include <functional>
#include <string>
#include <vector>

namespace plsim {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// A soft sub-check failed; this only fails the suite in assert mode.
  bool soft_violation = false;
  std::string detail;
  double seconds = 0.0;
};

using CriterionCallback = std::function<void(const CriterionResult&)>;

/// Runs every criterion in order, invoking `on_result` after each.
std::vector<CriterionResult> run_acceptance(const CriterionCallback& on_result = {});

/// Runs one criterion by id (1..11). Throws std::out_of_range otherwise.
CriterionResult run_criterion(int id);

/// "PASS [ 3] name (1.23 s): detail"
std::string format_result(const CriterionResult& r);

bool acceptance_succeeded(const std::vector<CriterionResult>& results,
                          bool assert_soft);

}  // namespace plsim
