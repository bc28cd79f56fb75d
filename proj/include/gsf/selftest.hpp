#pragma once

// Acceptance suite: seven criteria, each checked against independent oracles
// with a runtime budget. Always runs on the default configuration.

#include "gsf/report.hpp"

#include <string>
#include <vector>

namespace gsf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0;
  double limit = 0;     // runtime budget in seconds
  Json details = Json::object();
  std::string message;  // first failed assertion or error text
};

constexpr int kCriterionCount = 7;

/// Runs the listed criteria (all when empty), in id order.
std::vector<CriterionResult> run_selftest(const std::vector<int>& ids = {});

Report selftest_report(const std::vector<CriterionResult>& results);

/// One line per criterion: "[PASS] 3 embedding suite (12.3 s / 60 s)" plus the message on failure.
std::string format_criterion_line(const CriterionResult& r);

}  // namespace gsf
