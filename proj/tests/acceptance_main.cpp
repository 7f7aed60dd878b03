// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
// Optional arguments select criteria by number.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <set>

#include "dqt/acceptance.hpp"

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto all = dqt::acceptance::criteria();
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!only.empty() && !only.count(static_cast<int>(i + 1))) continue;
    dqt::acceptance::Result r;
    try {
      r = all[i]();
    } catch (const std::exception& e) {
      r = {static_cast<int>(i + 1), "criterion threw", false, e.what()};
    }
    std::printf("%s criterion %d: %s -- %s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
