#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plvote/instance.hpp"
#include "plvote/population.hpp"

namespace plvote {

/// A lower-bound instance together with its predicted population outcome.
struct ConstructionReport {
  std::string family;
  Instance instance;
  std::optional<Candidate> predicted_winner;  // unset for lottery rules or "B loses"
  Candidate optimal_candidate = 0;
  std::string target_rule;
  std::string predicted_outcome;
  double population_distortion = 0.0;
  double closed_form_distortion = 0.0;
  double lower_bound = 0.0;  // tabulated lower bound at these parameters
  std::map<std::string, Candidate> roles;
  std::map<std::string, double> params;
  std::map<std::string, bool> flags;
  std::vector<Candidate> tiebreak;

  bool all_flags() const;
};

nlohmann::json to_json(const ConstructionReport& r);

/// m-1 equiprobable types; type k has u_B = 1-eps, u_k = 1, zero elsewhere.
ConstructionReport construct_rd_lb(int m, double beta, double epsilon);

/// Spoiler instance: a gamma fraction loves W, everyone else is indifferent
/// among the other m-1 candidates.
ConstructionReport construct_plurality_lb(int m, double beta, double epsilon);

struct BetaWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Range of beta satisfying beta <= m/(3 ln m) and beta >= 2 ln beta + 2 ln ln m.
BetaWindow pluralityveto_beta_window(int m);

ConstructionReport construct_pluralityveto_lb(int m, double beta);

/// Three-candidate cycle with margins p_{W,Y} = p_{Y,B} = 1/2 + 1/beta.
ConstructionReport construct_copeland_lb(double beta, double epsilon);

/// E(beta, eta, delta) = e^-b + e^-b*eta + e^-b(1-eta) + e^(-b+delta).
double tournament_error_term(double beta, double eta, double delta);

struct TournamentParams {
  double eta, p, q, s, delta;
};
TournamentParams tournament_params(double gamma, double epsilon);

/// Smallest beta with E(beta, eta, delta) < gamma/4, by bisection.
double tournament_beta0(double gamma, double epsilon);

double default_tournament_gamma(double rho);

/// Finite-precision construction. `beta` unset means auto (beta0).
ConstructionReport construct_tournament_lb(double rho, double epsilon, double gamma,
                                           std::optional<double> beta);

/// The three instances obtained by rotating candidate indices (0,1,2) -> (k, k+1, k+2).
std::array<Instance, 3> cyclic_relabelings(const ConstructionReport& r);

}  // namespace plvote
