#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace plvote {

using Candidate = int;

/// One voter type of a finite mixture.
struct VoterType {
  double fraction = 0.0;
  std::vector<double> utilities;
};

/// Exchangeable family: `special` gets `base`, a uniformly random k-subset of
/// the remaining m-1 candidates gets `high`, everyone else gets `low`.
struct SymmetricSubsetFamily {
  double fraction = 0.0;
  Candidate special = 0;
  double base = 0.0;
  double high = 1.0;
  double low = 0.0;
  int k = 1;
};

/// Population of voters: m candidates, inverse temperature, and the mixture.
struct Instance {
  int m = 0;
  double beta = 1.0;
  std::vector<VoterType> types;
  std::vector<SymmetricSubsetFamily> families;

  /// Throws PreconditionError naming the first violated invariant.
  void validate() const;

  /// Mixture-weighted expected utility of every candidate.
  std::vector<double> util() const;

  std::size_t entry_count() const { return types.size() + families.size(); }
};

inline constexpr double kFractionTolerance = 1e-12;

/// Ranking of all m candidates, best first.
struct Ranking {
  std::vector<Candidate> order;
};

bool is_permutation_of_range(const std::vector<int>& v, int m);

// JSON schema:
// {"m": int, "beta": float,
//  "types": [{"fraction": f, "utilities": [...]}],
//  "families": [{"fraction": f, "special": i, "base": f, "high": f, "low": f, "k": i}]}
nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace plvote
