#pragma once

// Oracle and property checks that gate the trust placed in any benchmark.

#include <string>
#include <vector>

namespace ioncv {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured error or figure of merit
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_invariant_suite();

// One line per check: "PASS name value=... threshold=... detail".
std::string format_check(const CheckResult& c);

}  // namespace ioncv
