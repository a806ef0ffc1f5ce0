// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: plsim_acceptance [--assert] [ID...]

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "plsim/acceptance.hpp"

int main(int argc, char** argv) {
  bool assert_soft = false;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--assert") == 0) {
      assert_soft = true;
      continue;
    }
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || id < 1 || id > 11) {
      std::cerr << "usage: plsim_acceptance [--assert] [ID...]\n";
      return 2;
    }
    ids.push_back(static_cast<int>(id));
  }

  std::vector<plsim::CriterionResult> results;
  auto report = [](const plsim::CriterionResult& r) {
    std::cout << plsim::format_result(r) << std::endl;
  };
  if (ids.empty()) {
    results = plsim::run_acceptance(report);
  } else {
    for (int id : ids) {
      results.push_back(plsim::run_criterion(id));
      report(results.back());
    }
  }

  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  return plsim::acceptance_succeeded(results, assert_soft) ? 0 : 1;
}
