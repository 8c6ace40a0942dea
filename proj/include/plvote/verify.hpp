#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plvote/common.hpp"

namespace plvote::verify {

struct Check {
  std::string name;
  std::string expected;
  std::string observed;
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
};

struct Options {
  std::uint64_t seed = 20250101;
  std::optional<double> beta;          // overrides the suite's default beta
  std::optional<std::size_t> samples;  // overrides sweep sizes
  Exec exec = Exec::Parallel;
};

struct SuiteInfo {
  std::string name;
  int criterion;
  std::string title;
};

const std::vector<SuiteInfo>& suites();

/// Suite by name ("sigmoid", "copeland-lb", ...) or by criterion number.
std::optional<SuiteInfo> find_suite(const std::string& key);

SuiteResult run_suite(const std::string& name, const Options& opt = {});

}  // namespace plvote::verify
