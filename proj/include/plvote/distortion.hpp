#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plvote/common.hpp"
#include "plvote/instance.hpp"
#include "plvote/population.hpp"
#include "plvote/rules.hpp"

namespace plvote {

inline constexpr double kDefaultAmbiguity = 1e-6;

/// Ratio max_j Util_j / sum_j L_j Util_j. Returns 1 when every Util is 0 and
/// +infinity when only the denominator vanishes.
double lottery_distortion(const std::vector<double>& util, const std::vector<double>& lottery);

// ---------------------------------------------------------------------------
// Population limit

struct PopulationOutcome {
  bool ambiguous = false;
  RuleOutcome outcome;      // valid when !ambiguous
  double decisive_margin = 0.0;
};

/// Applies a non-veto rule to PopulationStats. A result whose decisive margin
/// (score gap, or distance of any pairwise margin from 1/2 for Copeland) is
/// below `tau` is reported as ambiguous.
PopulationOutcome population_winner(const PopulationStats& ps, Rule rule,
                                    const TieBreakOrder& tb, double tau = kDefaultAmbiguity);

struct VetoProbe {
  Candidate candidate = 0;
  double top = 0.0;
  double bottom = 0.0;
  bool loses = false;  // bottom exceeds top by more than tau
};

VetoProbe veto_limit_probe(const PopulationStats& ps, Candidate c, double tau = kDefaultAmbiguity);

// ---------------------------------------------------------------------------
// Simulation

struct SimulationConfig {
  std::size_t n = 1000;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  RuleConfig rule_config;
  Exec exec = Exec::Parallel;
};

struct DistortionEstimate {
  std::string rule;
  std::optional<double> population_value;  // unset for veto rules or ambiguous limits
  double empirical_mean = 0.0;             // max Util / mean outcome utility
  double ci_lo = 0.0, ci_hi = 0.0;         // 95%, only when trials >= 2
  bool has_ci = false;
  bool unbounded = false;                  // mean outcome utility is zero
  double numerator = 0.0;                  // max_j Util_j
  double mean_outcome_util = 0.0;
  std::vector<double> outcome_utils;       // one per trial
  std::vector<std::size_t> wins;           // point-mass wins per candidate
  std::size_t n = 0, trials = 0;
  std::uint64_t seed = 0;
};

/// Runs `trials` elections of n voters and evaluates every rule on the same
/// sampled profile per trial.
std::vector<DistortionEstimate> simulate_rules(const Instance& inst, const std::vector<Rule>& rules,
                                               const SimulationConfig& cfg);

DistortionEstimate empirical_distortion(const Instance& inst, Rule rule, const SimulationConfig& cfg);

// ---------------------------------------------------------------------------
// Tabulated bounds

struct BoundReport {
  std::string rule;
  double beta = 0.0;
  int m = 0;
  double epsilon = 0.0;
  std::optional<double> upper_bound;
  std::optional<double> lower_bound;
  bool lower_bound_asymptotic = false;
  double pclc_bound = 0.0;
  std::optional<double> observed;
  std::optional<bool> satisfied;

  /// Records `value` and sets satisfied = value <= ub * (1 + rel_tol) when an
  /// upper bound exists.
  void observe(double value, double rel_tol = 1e-9);
};

BoundReport tabulated_bounds(Rule rule, double beta, int m, double epsilon = 0.1);
double pclc_bound(double beta);
double tournament_upper_bound(double beta);
double plurality_upper_bound(double beta, int m);

// ---------------------------------------------------------------------------
// Probes

struct TwoCandidateReport {
  double p_xz = 0.0;
  double ratio = 0.0;  // Util_Z / Util_X
  double bound = 0.0;
  bool applicable = false;  // p_xz >= 1/2
  bool holds = true;
};

TwoCandidateReport two_candidate_probe(const PopulationStats& ps, double beta, Candidate x,
                                       Candidate z);

struct LinearizationReport {
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

LinearizationReport linearization_probe(const std::vector<double>& x, const std::vector<double>& z,
                                        double beta);

struct SweepConfig {
  int m_min = 2;
  int m_max = 8;
  int max_types = 6;
  double beta = 5.0;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double tau = kDefaultAmbiguity;
  double rel_tol = 1e-9;
  Exec exec = Exec::Parallel;
};

struct SweepReport {
  std::string rule;
  std::size_t samples = 0;
  std::size_t evaluated = 0;
  std::size_t ambiguous = 0;
  std::size_t violations = 0;
  double bound = 0.0;      // bound at m_max (plurality/RD bounds depend on m)
  double max_ratio = 1.0;
  double max_ratio_over_bound = 0.0;
  std::vector<std::size_t> violating_samples;
};

/// Random mixture for sweep sample `index`: m in [m_min, m_max], 1..max_types
/// types, Dirichlet(1) fractions, utilities uniform on [0,1].
Instance random_sweep_instance(const SweepConfig& cfg, std::size_t index);

SweepReport upper_bound_sweep(Rule rule, const SweepConfig& cfg);

struct PclcReport {
  bool precondition_ok = false;
  std::optional<Candidate> condorcet_loser;
  double win_probability = 0.0;
  double threshold = 0.0;  // 1/m
  bool below_threshold = false;
  std::size_t trials = 0;
};

PclcReport pclc_probe(const Instance& inst, Rule rule, const SimulationConfig& cfg,
                      double tau = kDefaultAmbiguity);

}  // namespace plvote
