#pragma once

#include <stdexcept>
#include <string>

namespace plvote {

/// Execution policy for the data-parallel kernels. `Serial` is the reference
/// path; `Parallel` dispatches over OpenMP and must produce identical results.
enum class Exec { Serial, Parallel };

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ExactPathUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedProfile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double gap)
      : std::runtime_error(what), achieved_gap(gap) {}
  double achieved_gap;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

const char* version();

}  // namespace plvote
