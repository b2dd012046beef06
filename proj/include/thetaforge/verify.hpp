#pragma once

#include "thetaforge/profile.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace thetaforge {

struct SuiteOptions {
  int trials = 20;
  std::uint64_t seed = 0;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
  const Check* first_failure() const;
};

// lattice, theta, profile, extensions, thermo, prolim, siegel.
const std::vector<std::string>& suite_names();

// Runs one property suite; "all" is not accepted here. Throws DomainError for unknown names.
SuiteResult run_suite(const std::string& name, const SuiteOptions& options);

}  // namespace thetaforge
