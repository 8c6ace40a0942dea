#include "plvote/distortion.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <omp.h>

#include "plvote/profile.hpp"
#include "plvote/rng.hpp"
#include "plvote/sigmoid.hpp"

namespace plvote {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;

// Score-based rules: the decisive margin is the gap between the winner's
// score and the best other score.
PopulationOutcome scored_outcome(std::vector<double> scores, const TieBreakOrder& tb, double tau) {
  PopulationOutcome res;
  const Candidate w = argmax_with_tiebreak(scores, tb);
  double runner_up = -kInf;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (static_cast<Candidate>(j) != w) runner_up = std::max(runner_up, scores[j]);
  res.decisive_margin = scores[w] - runner_up;
  res.ambiguous = res.decisive_margin < tau;
  const int m = static_cast<int>(scores.size());
  res.outcome = RuleOutcome::point_mass(m, w, std::move(scores));
  return res;
}

double outcome_utility(const std::vector<double>& util, const std::vector<double>& lottery) {
  double v = 0.0;
  for (std::size_t j = 0; j < util.size(); ++j) v += lottery[j] * util[j];
  return v;
}

std::optional<double> population_value(const PopulationStats& ps, Rule rule, const RuleConfig& rc) {
  if (needs_profile(rule)) return std::nullopt;
  const TieBreakOrder tb = rc.tiebreak ? *rc.tiebreak : TieBreakOrder::identity(ps.m);
  const PopulationOutcome pop = population_winner(ps, rule, tb);
  if (pop.ambiguous) return std::nullopt;
  return lottery_distortion(ps.util, pop.outcome.lottery);
}

TallyNeeds merged_needs(const std::vector<Rule>& rules) {
  TallyNeeds needs{false, false};
  for (Rule r : rules) {
    const TallyNeeds n = tally_needs(r);
    needs.pairwise = needs.pairwise || n.pairwise;
    needs.bottom = needs.bottom || n.bottom;
  }
  return needs;
}

TallyStats sample_tally(const Instance& inst, const std::vector<Rule>& rules,
                        const SimulationConfig& cfg, std::uint64_t trial) {
  const TallyNeeds needs = merged_needs(rules);
  const bool store = std::any_of(rules.begin(), rules.end(), needs_profile);
  if (!store) return tally_sampled(inst, cfg.n, cfg.seed, trial, needs, cfg.exec);
  auto profile = std::make_shared<const Profile>(sample_profile(inst, cfg.n, cfg.seed, trial, cfg.exec));
  return tally(std::move(profile), needs, cfg.exec);
}

double tabulated_upper(Rule rule, double beta, int m) {
  switch (rule) {
    case Rule::Borda:
    case Rule::Copeland: return tournament_upper_bound(beta);
    case Rule::Plurality: return plurality_upper_bound(beta, m);
    case Rule::RandomDictator: return m * std::exp(beta);
    default: throw PreconditionError("no upper bound stated for " + std::string(rule_name(rule)));
  }
}

}  // namespace

double lottery_distortion(const std::vector<double>& util, const std::vector<double>& lottery) {
  require(util.size() == lottery.size(), "lottery and utility lengths differ");
  const double best = *std::max_element(util.begin(), util.end());
  if (best <= 0.0) return 1.0;
  const double got = outcome_utility(util, lottery);
  return got > 0.0 ? best / got : kInf;
}

PopulationOutcome population_winner(const PopulationStats& ps, Rule rule, const TieBreakOrder& tb,
                                    double tau) {
  const int m = ps.m;
  require(tb.size() == m, "tie-break order size mismatch");
  switch (rule) {
    case Rule::Plurality: return scored_outcome(ps.top, tb, tau);
    case Rule::Borda: {
      std::vector<double> scores(static_cast<std::size_t>(m), 0.0);
      for (int j = 0; j < m; ++j)
        for (int jp = 0; jp < m; ++jp)
          if (j != jp) scores[j] += ps.p(j, jp);
      return scored_outcome(std::move(scores), tb, tau);
    }
    case Rule::Copeland: {
      PopulationOutcome res;
      std::vector<double> scores(static_cast<std::size_t>(m), 0.0);
      double closest = kInf;
      for (int j = 0; j < m; ++j) {
        for (int jp = 0; jp < m; ++jp) {
          if (j == jp) continue;
          closest = std::min(closest, std::abs(ps.p(j, jp) - 0.5));
          if (ps.p(j, jp) > 0.5) scores[j] += 1.0;
        }
      }
      res.decisive_margin = closest;
      res.ambiguous = closest < tau;
      const Candidate w = argmax_with_tiebreak(scores, tb);
      res.outcome = RuleOutcome::point_mass(m, w, std::move(scores));
      return res;
    }
    case Rule::RandomDictator: {
      PopulationOutcome res;
      res.outcome.lottery = ps.top;
      res.outcome.scores = ps.top;
      res.decisive_margin = kInf;
      return res;
    }
    case Rule::MaximalLotteries: {
      PopulationOutcome res;
      std::vector<double> M(static_cast<std::size_t>(m) * m, 0.0);
      double closest = kInf;
      for (int j = 0; j < m; ++j) {
        for (int jp = 0; jp < m; ++jp) {
          if (j == jp) continue;
          M[static_cast<std::size_t>(j) * m + jp] = ps.p(j, jp) - ps.p(jp, j);
          closest = std::min(closest, std::abs(ps.p(j, jp) - 0.5));
        }
      }
      res.decisive_margin = closest;
      res.ambiguous = closest < tau;
      res.outcome.lottery = maximal_lottery(M, m);
      return res;
    }
    case Rule::PluralityVeto:
    case Rule::PrunedPluralityVeto:
      throw PreconditionError("veto rules have no population decision function; use veto_limit_probe");
  }
  throw PreconditionError("unknown rule");
}

VetoProbe veto_limit_probe(const PopulationStats& ps, Candidate c, double tau) {
  require(c >= 0 && c < ps.m, "candidate out of range");
  if (!ps.has_bottom()) throw ExactPathUnavailable("bottom probabilities unavailable for this instance");
  VetoProbe v;
  v.candidate = c;
  v.top = ps.top[c];
  v.bottom = ps.bottom[c];
  v.loses = v.bottom - v.top > tau;
  return v;
}

std::vector<DistortionEstimate> simulate_rules(const Instance& inst, const std::vector<Rule>& rules,
                                               const SimulationConfig& cfg) {
  require(cfg.n >= 1, "simulation needs n >= 1");
  require(cfg.trials >= 1, "simulation needs trials >= 1");
  require(!rules.empty(), "simulation needs at least one rule");
  inst.validate();
  const PopulationStats ps = population_stats(inst);
  const double best = *std::max_element(ps.util.begin(), ps.util.end());

  std::vector<DistortionEstimate> est(rules.size());
  for (std::size_t r = 0; r < rules.size(); ++r) {
    auto& e = est[r];
    e.rule = std::string(rule_name(rules[r]));
    e.population_value = population_value(ps, rules[r], cfg.rule_config);
    e.numerator = best;
    e.wins.assign(static_cast<std::size_t>(inst.m), 0);
    e.n = cfg.n;
    e.trials = cfg.trials;
    e.seed = cfg.seed;
  }

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const TallyStats t = sample_tally(inst, rules, cfg, trial);
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const RuleOutcome out = apply_rule(rules[r], t, cfg.rule_config);
      est[r].outcome_utils.push_back(outcome_utility(ps.util, out.lottery));
      if (const auto w = out.winner()) ++est[r].wins[*w];
    }
  }

  for (auto& e : est) {
    const double T = static_cast<double>(e.trials);
    const double mean = std::accumulate(e.outcome_utils.begin(), e.outcome_utils.end(), 0.0) / T;
    e.mean_outcome_util = mean;
    if (best <= 0.0) {
      e.empirical_mean = 1.0;
    } else if (mean <= 0.0) {
      e.unbounded = true;
      e.empirical_mean = kInf;
    } else {
      e.empirical_mean = best / mean;
    }
    if (e.trials >= 2 && !e.unbounded) {
      double ss = 0.0;
      for (double v : e.outcome_utils) ss += (v - mean) * (v - mean);
      const double se_mean = std::sqrt(ss / (T - 1.0) / T);
      // Delta method for best / mean.
      const double se = best > 0.0 ? best * se_mean / (mean * mean) : 0.0;
      e.ci_lo = e.empirical_mean - kZ95 * se;
      e.ci_hi = e.empirical_mean + kZ95 * se;
      e.has_ci = true;
    }
  }
  return est;
}

DistortionEstimate empirical_distortion(const Instance& inst, Rule rule, const SimulationConfig& cfg) {
  return simulate_rules(inst, {rule}, cfg).front();
}

void BoundReport::observe(double value, double rel_tol) {
  observed = value;
  if (upper_bound) satisfied = value <= *upper_bound * (1.0 + rel_tol);
}

double pclc_bound(double beta) { return 0.5 * beta * coth_half(beta); }

double tournament_upper_bound(double beta) { return beta * coth_half(beta); }

double plurality_upper_bound(double beta, int m) {
  require(m >= 2, "plurality bound needs m >= 2");
  return std::min(std::exp(2.0 * beta) / beta,
                  m * std::exp(beta) / (std::log(m - 1.0) + 2.0) + 1.0);
}

BoundReport tabulated_bounds(Rule rule, double beta, int m, double epsilon) {
  require(beta > 0.0, "beta must be positive");
  require(m >= 2, "m must be >= 2");
  BoundReport b;
  b.rule = std::string(rule_name(rule));
  b.beta = beta;
  b.m = m;
  b.epsilon = epsilon;
  b.pclc_bound = pclc_bound(beta);
  const double lnm = std::log(static_cast<double>(m));
  switch (rule) {
    case Rule::Borda:
      b.upper_bound = tournament_upper_bound(beta);
      b.lower_bound = beta;
      b.lower_bound_asymptotic = true;
      break;
    case Rule::Copeland:
      b.upper_bound = tournament_upper_bound(beta);
      b.lower_bound = (1.0 - epsilon) * beta;
      break;
    case Rule::Plurality:
      b.upper_bound = plurality_upper_bound(beta, m);
      b.lower_bound = std::min(std::exp(beta) / (2.0 + epsilon) - 1.0, m / (2.0 + epsilon) - 1.0);
      break;
    case Rule::PluralityVeto:
    case Rule::PrunedPluralityVeto:
      b.lower_bound = beta * lnm / 6.0;
      break;
    case Rule::RandomDictator:
      b.upper_bound = m * std::exp(beta);
      b.lower_bound = (1.0 - epsilon) * m;
      break;
    case Rule::MaximalLotteries:
      throw PreconditionError("no bounds tabulated for maximal_lotteries");
  }
  return b;
}

TwoCandidateReport two_candidate_probe(const PopulationStats& ps, double beta, Candidate x,
                                       Candidate z) {
  require(x != z && x >= 0 && z >= 0 && x < ps.m && z < ps.m, "need two distinct candidates");
  TwoCandidateReport r;
  r.p_xz = ps.p(x, z);
  const double ux = ps.util[x], uz = ps.util[z];
  r.ratio = ux > 0.0 ? uz / ux : (uz > 0.0 ? kInf : 1.0);
  r.bound = pclc_bound(beta);
  r.applicable = r.p_xz >= 0.5;
  r.holds = !r.applicable || r.ratio <= r.bound * (1.0 + 1e-9);
  return r;
}

LinearizationReport linearization_probe(const std::vector<double>& x, const std::vector<double>& z,
                                        double beta) {
  require(x.size() == z.size(), "x and z must have equal length");
  LinearizationReport r;
  double sx = 0.0, sz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.lhs += sigma(beta, x[i] - z[i]) - sigma(beta, -z[i]);
    sx += x[i];
    sz += z[i];
  }
  r.rhs = 0.5 * (sx - sz) / coth_half(beta);
  r.holds = r.lhs >= r.rhs - 1e-9;
  return r;
}

Instance random_sweep_instance(const SweepConfig& cfg, std::size_t index) {
  require(cfg.m_min >= 2 && cfg.m_max >= cfg.m_min, "sweep needs 2 <= m_min <= m_max");
  require(cfg.max_types >= 1, "sweep needs max_types >= 1");
  Stream rng(derive_key(cfg.seed, index));
  Instance inst;
  inst.m = cfg.m_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.m_max - cfg.m_min + 1)));
  inst.beta = cfg.beta;
  const int types = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.max_types)));
  std::vector<double> w(static_cast<std::size_t>(types));
  for (double& x : w) x = -std::log(rng.uniform_open());  // Dirichlet(1) via exponentials
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (int t = 0; t < types; ++t) {
    std::vector<double> u(static_cast<std::size_t>(inst.m));
    for (double& x : u) x = rng.uniform();
    inst.types.push_back({w[t] / total, std::move(u)});
  }
  return inst;
}

SweepReport upper_bound_sweep(Rule rule, const SweepConfig& cfg) {
  require(rule == Rule::Copeland || rule == Rule::Borda || rule == Rule::Plurality ||
              rule == Rule::RandomDictator,
          "upper-bound sweep supports copeland, borda, plurality, random_dictator");
  SweepReport rep;
  rep.rule = std::string(rule_name(rule));
  rep.samples = cfg.samples;
  rep.bound = tabulated_upper(rule, cfg.beta, cfg.m_max);
  const auto count = static_cast<long long>(cfg.samples);
  // Exceptions must not cross the parallel region; the first one is rethrown.
  std::exception_ptr error;
  std::atomic<bool> failed{false};

#pragma omp parallel if (cfg.exec == Exec::Parallel)
  {
    SweepReport local;
    local.max_ratio = 1.0;
#pragma omp for schedule(dynamic, 64) nowait
    for (long long i = 0; i < count; ++i) {
      if (failed) continue;
      try {
      const Instance inst = random_sweep_instance(cfg, static_cast<std::size_t>(i));
      const PopulationStats ps = population_stats(inst);
      const PopulationOutcome pop =
          population_winner(ps, rule, TieBreakOrder::identity(inst.m), cfg.tau);
      if (pop.ambiguous) {
        ++local.ambiguous;
        continue;
      }
      ++local.evaluated;
      const double d = lottery_distortion(ps.util, pop.outcome.lottery);
      const double ub = tabulated_upper(rule, cfg.beta, inst.m);
      local.max_ratio = std::max(local.max_ratio, d);
      local.max_ratio_over_bound = std::max(local.max_ratio_over_bound, d / ub);
      if (!(d <= ub * (1.0 + cfg.rel_tol))) local.violating_samples.push_back(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(plvote_sweep_error)
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
#pragma omp critical(plvote_sweep_merge)
    {
      rep.evaluated += local.evaluated;
      rep.ambiguous += local.ambiguous;
      rep.max_ratio = std::max(rep.max_ratio, local.max_ratio);
      rep.max_ratio_over_bound = std::max(rep.max_ratio_over_bound, local.max_ratio_over_bound);
      rep.violating_samples.insert(rep.violating_samples.end(), local.violating_samples.begin(),
                                   local.violating_samples.end());
    }
  }
  if (error) std::rethrow_exception(error);
  std::sort(rep.violating_samples.begin(), rep.violating_samples.end());
  rep.violations = rep.violating_samples.size();
  return rep;
}

PclcReport pclc_probe(const Instance& inst, Rule rule, const SimulationConfig& cfg, double tau) {
  const PopulationStats ps = population_stats(inst);
  PclcReport rep;
  rep.threshold = 1.0 / inst.m;
  for (int c = 0; c < inst.m && !rep.condorcet_loser; ++c) {
    bool loser = true;
    for (int j = 0; j < inst.m && loser; ++j)
      if (j != c && !(ps.p(c, j) < 0.5 - tau)) loser = false;
    if (loser) rep.condorcet_loser = c;
  }
  rep.precondition_ok = rep.condorcet_loser.has_value();
  if (!rep.precondition_ok) return rep;
  require(cfg.trials >= 1 && cfg.n >= 1, "pclc probe needs n >= 1 and trials >= 1");

  const std::vector<Rule> rules{rule};
  double total = 0.0;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const TallyStats t = sample_tally(inst, rules, cfg, trial);
    total += apply_rule(rule, t, cfg.rule_config).lottery[*rep.condorcet_loser];
  }
  rep.trials = cfg.trials;
  rep.win_probability = total / static_cast<double>(cfg.trials);
  rep.below_threshold = rep.win_probability < rep.threshold;
  return rep;
}

}  // namespace plvote
