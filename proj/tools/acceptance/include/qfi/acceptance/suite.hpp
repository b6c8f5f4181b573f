#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qfi::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Measured quantities against their limits, one line.
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  /// Flips the sign of the harmonic ω deformation (∂_ωL) in every family and
  /// classical model built by the suite. Used as a mutation check.
  bool inject_sign_flip = false;
  int threads = 1;
  /// Restrict to these criterion ids; empty runs all.
  std::vector<int> only;
  /// Prints each row as soon as its criterion finishes.
  bool stream = false;
};

std::vector<CriterionResult> run_suite(const SuiteOptions& options = {});

/// Fixed-width pass/fail table, one row per criterion.
std::string format_table(const std::vector<CriterionResult>& results);
std::string format_row(const CriterionResult& result);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace qfi::acceptance
