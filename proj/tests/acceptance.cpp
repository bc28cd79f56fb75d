// Acceptance binary: one line per criterion, exit status 1 if any fails.

#include "gsf/selftest.hpp"

#include <cstdio>

int main() {
  bool all = true;
  for (const auto& r : gsf::run_selftest()) {
    std::printf("%s\n", gsf::format_criterion_line(r).c_str());
    std::fflush(stdout);
    all &= r.passed;
  }
  return all ? 0 : 1;
}
