// Acceptance runner: one PASS/FAIL line per criterion, details for failures.
#include <cstdio>
#include <string>
#include <vector>

#include "plvote/verify.hpp"

int main(int argc, char** argv) {
  using namespace plvote::verify;
  std::vector<std::string> keys(argv + 1, argv + argc);
  if (keys.empty())
    for (const auto& s : suites()) keys.push_back(s.name);

  int failed = 0;
  for (const auto& key : keys) {
    const auto info = find_suite(key);
    if (!info) {
      std::fprintf(stderr, "unknown criterion '%s'\n", key.c_str());
      return 2;
    }
    const SuiteResult r = run_suite(info->name);
    for (const auto& c : r.checks)
      std::printf("    %-4s %s: expected %s, observed %s\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                  c.expected.c_str(), c.observed.c_str());
    std::printf("[%s] criterion %d: %s (%.2f s)\n", r.passed() ? "PASS" : "FAIL", info->criterion,
                r.title.c_str(), r.seconds);
    std::fflush(stdout);
    if (!r.passed()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
