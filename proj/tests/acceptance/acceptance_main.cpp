#include <cstdlib>
#include <iostream>

#include "qfi/acceptance/suite.hpp"

// Usage: qfi_acceptance [criterion ids...]; no ids runs every criterion.
int main(int argc, char** argv) {
  qfi::acceptance::SuiteOptions options;
  options.stream = true;
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  const auto results = qfi::acceptance::run_suite(options);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
