#pragma once

#include <string>
#include <vector>

#include "vdc/config.hpp"

namespace vdc {

struct CheckResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst = 0.0;      // worst observed error
  double tolerance = 0.0;  // pass threshold per trial

  bool passed() const { return failures == 0; }
};

struct SelfCheckReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  int checks_passed() const;
};

/// Randomized oracle-equivalence and invariant suite over random models,
/// plus consistency checks on the supplied config's model when given.
/// Deterministic (fixed seed).
SelfCheckReport run_selfcheck(const LoadedConfig* config = nullptr);

}  // namespace vdc
