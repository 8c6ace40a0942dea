#include "plvote/rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "plvote/common.hpp"

namespace plvote {

namespace {

constexpr std::array<std::pair<Rule, std::string_view>, 7> kRuleNames{{
    {Rule::Plurality, "plurality"},
    {Rule::Borda, "borda"},
    {Rule::Copeland, "copeland"},
    {Rule::PluralityVeto, "plurality_veto"},
    {Rule::PrunedPluralityVeto, "pruned_plurality_veto"},
    {Rule::RandomDictator, "random_dictator"},
    {Rule::MaximalLotteries, "maximal_lotteries"},
}};

void require_pairwise(const TallyStats& t) {
  require(t.has_pairwise, "rule needs pairwise counts but the tally was built without them");
}


std::vector<std::size_t> resolve_veto_order(const std::vector<std::size_t>& given, std::size_t n) {
  if (given.empty()) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
  }
  require(given.size() == n, "veto order must list every voter exactly once");
  std::vector<char> seen(n, 0);
  for (std::size_t v : given) {
    require(v < n && !seen[v], "veto order must be a permutation of voter indices");
    seen[v] = 1;
  }
  return given;
}

// Plurality Veto restricted to candidates with `eligible` set. Each voter's
// token goes to their highest eligible candidate; the first n-1 voters in
// `order` veto their lowest-ranked eligible candidate that still has tokens.
RuleOutcome run_veto(const Profile& p, const std::vector<char>& eligible,
                     const std::vector<std::size_t>& order) {
  const int m = p.m;
  std::vector<long long> tokens(static_cast<std::size_t>(m), 0);
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::uint16_t c : p.ranking(i)) {
      if (eligible[c]) {
        ++tokens[c];
        break;
      }
    }
  }
  std::vector<double> scores(tokens.begin(), tokens.end());
  for (std::size_t r = 0; r + 1 < p.n; ++r) {
    const auto ranking = p.ranking(order[r]);
    for (int pos = m - 1; pos >= 0; --pos) {
      const std::uint16_t c = ranking[pos];
      if (eligible[c] && tokens[c] > 0) {
        --tokens[c];
        break;
      }
    }
  }
  const auto it = std::find_if(tokens.begin(), tokens.end(), [](long long x) { return x > 0; });
  return RuleOutcome::point_mass(m, static_cast<Candidate>(it - tokens.begin()), std::move(scores));
}

const Profile& require_profile(const TallyStats& t) {
  if (!t.profile) throw MalformedProfile("veto rules need the full rankings; tally has no profile");
  if (t.profile->n != t.n || t.profile->m != t.m ||
      t.profile->orders.size() != t.n * static_cast<std::size_t>(t.m))
    throw MalformedProfile("profile does not match its tally");
  return *t.profile;
}

}  // namespace

std::vector<double> margin_matrix(const TallyStats& t) {
  require_pairwise(t);
  const int m = t.m;
  std::vector<double> M(static_cast<std::size_t>(m) * m, 0.0);
  const double n = static_cast<double>(t.n);
  for (int j = 0; j < m; ++j)
    for (int jp = 0; jp < m; ++jp)
      if (j != jp)
        M[static_cast<std::size_t>(j) * m + jp] =
            (static_cast<double>(t.pair_count(j, jp)) - static_cast<double>(t.pair_count(jp, j))) / n;
  return M;
}

std::string_view rule_name(Rule r) {
  for (const auto& [rule, name] : kRuleNames)
    if (rule == r) return name;
  return "unknown";
}

std::optional<Rule> rule_from_name(std::string_view name) {
  for (const auto& [rule, n] : kRuleNames)
    if (n == name) return rule;
  return std::nullopt;
}

bool needs_profile(Rule r) { return r == Rule::PluralityVeto || r == Rule::PrunedPluralityVeto; }

TallyNeeds tally_needs(Rule r) {
  switch (r) {
    case Rule::Plurality:
    case Rule::RandomDictator:
    case Rule::PluralityVeto:
    case Rule::PrunedPluralityVeto:
      return {false, false};
    default:
      return {true, false};
  }
}

TieBreakOrder TieBreakOrder::identity(int m) {
  std::vector<Candidate> p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 0);
  return TieBreakOrder(std::move(p));
}

TieBreakOrder::TieBreakOrder(std::vector<Candidate> priority) : priority_(std::move(priority)) {
  require(is_permutation_of_range(priority_, static_cast<int>(priority_.size())),
          "tie-break order must be a permutation of the candidates");
  rank_.resize(priority_.size());
  for (std::size_t i = 0; i < priority_.size(); ++i) rank_[priority_[i]] = static_cast<int>(i);
}

std::optional<Candidate> RuleOutcome::winner() const {
  for (std::size_t j = 0; j < lottery.size(); ++j)
    if (lottery[j] == 1.0) return static_cast<Candidate>(j);
  return std::nullopt;
}

RuleOutcome RuleOutcome::point_mass(int m, Candidate c, std::vector<double> scores) {
  RuleOutcome out;
  out.lottery.assign(static_cast<std::size_t>(m), 0.0);
  out.lottery[c] = 1.0;
  out.scores = std::move(scores);
  return out;
}

nlohmann::json to_json(const RuleOutcome& out, Rule rule, const TieBreakOrder& tb) {
  return {{"lottery", out.lottery},
          {"scores", out.scores},
          {"rule", std::string(rule_name(rule))},
          {"tiebreak", tb.priority()}};
}

Candidate argmax_with_tiebreak(const std::vector<double>& scores, const TieBreakOrder& tb) {
  require(tb.size() == static_cast<int>(scores.size()), "tie-break order size mismatch");
  Candidate best = tb.priority().front();
  for (Candidate c : tb.priority())
    if (scores[c] > scores[best]) best = c;
  return best;
}

RuleOutcome plurality(const TallyStats& t, const TieBreakOrder& tb) {
  std::vector<double> scores(t.top_counts.begin(), t.top_counts.end());
  const Candidate w = argmax_with_tiebreak(scores, tb);
  return RuleOutcome::point_mass(t.m, w, std::move(scores));
}

RuleOutcome borda(const TallyStats& t, const TieBreakOrder& tb) {
  require_pairwise(t);
  std::vector<double> scores(static_cast<std::size_t>(t.m), 0.0);
  for (int j = 0; j < t.m; ++j) {
    std::uint64_t total = 0;
    for (int jp = 0; jp < t.m; ++jp)
      if (jp != j) total += t.pair_count(j, jp);
    scores[j] = static_cast<double>(total);
  }
  const Candidate w = argmax_with_tiebreak(scores, tb);
  return RuleOutcome::point_mass(t.m, w, std::move(scores));
}

RuleOutcome copeland(const TallyStats& t, const TieBreakOrder& tb) {
  require_pairwise(t);
  std::vector<double> scores(static_cast<std::size_t>(t.m), 0.0);
  for (int j = 0; j < t.m; ++j) {
    for (int jp = 0; jp < t.m; ++jp) {
      if (jp == j) continue;
      const std::uint64_t twice = 2 * t.pair_count(j, jp);
      if (twice > t.n || (twice == t.n && tb.prefers(j, jp))) scores[j] += 1.0;
    }
  }
  const Candidate w = argmax_with_tiebreak(scores, tb);
  return RuleOutcome::point_mass(t.m, w, std::move(scores));
}

RuleOutcome random_dictator(const TallyStats& t) {
  RuleOutcome out;
  out.lottery.resize(static_cast<std::size_t>(t.m));
  for (int j = 0; j < t.m; ++j) out.lottery[j] = t.t(j);
  out.scores = out.lottery;
  return out;
}

RuleOutcome plurality_veto(const TallyStats& t, const std::vector<std::size_t>& veto_order) {
  const Profile& p = require_profile(t);
  const std::vector<char> all(static_cast<std::size_t>(p.m), 1);
  return run_veto(p, all, resolve_veto_order(veto_order, p.n));
}

RuleOutcome pruned_plurality_veto(const TallyStats& t, double alpha,
                                  const std::vector<std::size_t>& veto_order) {
  require(alpha > 0.0, "pruning parameter alpha must be positive");
  const Profile& p = require_profile(t);
  // Keep j when top_count_j >= alpha n / ((6 + alpha) m).
  const double threshold = alpha * static_cast<double>(t.n) / ((6.0 + alpha) * t.m);
  std::vector<char> keep(static_cast<std::size_t>(t.m), 0);
  bool any = false;
  for (int j = 0; j < t.m; ++j) {
    keep[j] = static_cast<double>(t.top_counts[j]) >= threshold;
    any = any || keep[j];
  }
  require(any, "pruning removed every candidate");
  return run_veto(p, keep, resolve_veto_order(veto_order, p.n));
}

double lottery_gap(const std::vector<double>& lottery, const std::vector<double>& margins, int m) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int jp = 0; jp < m; ++jp) {
    double v = 0.0;
    for (int j = 0; j < m; ++j) v += lottery[j] * margins[static_cast<std::size_t>(j) * m + jp];
    worst = std::max(worst, -v);
  }
  return std::max(worst, 0.0);
}

std::vector<double> maximal_lottery(const std::vector<double>& M, int m,
                                    const MaximalLotteryOptions& opt) {
  require(opt.tolerance > 0.0, "maximal lottery tolerance must be positive");
  require(static_cast<int>(M.size()) == m * m, "margin matrix size mismatch");
  auto at = [&](int j, int jp) { return M[static_cast<std::size_t>(j) * m + jp]; };
  std::vector<double> L(static_cast<std::size_t>(m), 0.0);

  // Weak Condorcet winner: a row with no negative entry is an optimal pure strategy.
  for (int j = 0; j < m; ++j) {
    bool dominant = true;
    for (int jp = 0; jp < m && dominant; ++jp)
      if (jp != j && at(j, jp) < 0.0) dominant = false;
    if (dominant && !(m == 2 && at(0, 1) == 0.0)) {
      L[j] = 1.0;
      return L;
    }
  }
  if (m == 2) {
    L = {0.5, 0.5};
    return L;
  }
  if (m == 3) {
    // Without a weak Condorcet winner the margins form a strict cycle and
    // the equilibrium is proportional to (M12, -M02, M01), sign-normalised.
    const double a = at(0, 1), b = at(0, 2), c = at(1, 2);
    const double sign = a > 0.0 ? 1.0 : -1.0;
    L = {sign * c, -sign * b, sign * a};
    const double total = L[0] + L[1] + L[2];
    for (double& x : L) x /= total;
    return L;
  }

  // Regret matching+ self-play with linearly weighted averages.
  std::vector<double> regret_row(m, 0.0), regret_col(m, 0.0);
  std::vector<double> x(m, 1.0 / m), y(m, 1.0 / m);
  std::vector<double> avg(m, 0.0), u(m);
  double weight_total = 0.0;
  auto normalise = [m](const std::vector<double>& r, std::vector<double>& s) {
    double tot = 0.0;
    for (double v : r) tot += v;
    for (int j = 0; j < m; ++j) s[j] = tot > 0.0 ? r[j] / tot : 1.0 / m;
  };
  auto update = [&](std::vector<double>& regret, const std::vector<double>& mine,
                    const std::vector<double>& opp) {
    // Utility of pure j against opp is (M opp)_j for both seats.
    double value = 0.0;
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += at(j, k) * opp[k];
      u[j] = s;
      value += mine[j] * s;
    }
    for (int j = 0; j < m; ++j) regret[j] = std::max(0.0, regret[j] + u[j] - value);
  };

  double gap = std::numeric_limits<double>::infinity();
  for (long long it = 1; it <= opt.max_iterations; ++it) {
    update(regret_row, x, y);
    normalise(regret_row, x);
    update(regret_col, y, x);
    normalise(regret_col, y);
    const double w = static_cast<double>(it);
    for (int j = 0; j < m; ++j) avg[j] += w * (x[j] + y[j]);
    weight_total += 2.0 * w;
    if (it % 64 == 0 || it == opt.max_iterations) {
      for (int j = 0; j < m; ++j) L[j] = avg[j] / weight_total;
      gap = lottery_gap(L, M, m);
      if (gap <= opt.tolerance) return L;
    }
  }
  throw NonConvergence("maximal lottery did not reach tolerance; achieved gap " + std::to_string(gap),
                       gap);
}

RuleOutcome maximal_lotteries(const TallyStats& t, const MaximalLotteryOptions& opt) {
  const auto M = margin_matrix(t);
  RuleOutcome out;
  out.lottery = maximal_lottery(M, t.m, opt);
  out.scores.resize(static_cast<std::size_t>(t.m));
  for (int jp = 0; jp < t.m; ++jp) {
    double v = 0.0;
    for (int j = 0; j < t.m; ++j) v += out.lottery[j] * M[static_cast<std::size_t>(j) * t.m + jp];
    out.scores[jp] = v;
  }
  return out;
}

CoarsenedTournament coarsen(const TallyStats& t, double rho) {
  require(rho > 0.0, "precision rho must be positive");
  require_pairwise(t);
  CoarsenedTournament ct{rho, t.m, std::vector<long long>(static_cast<std::size_t>(t.m) * t.m, 0)};
  const double n = static_cast<double>(t.n);
  for (int j = 0; j < t.m; ++j) {
    for (int jp = 0; jp < t.m; ++jp) {
      if (j == jp) continue;
      // (s - 1/2) / rho with s = c/n, formed from the integer 2c - n.
      const double num = 2.0 * static_cast<double>(t.pair_count(j, jp)) - n;
      ct.weights[static_cast<std::size_t>(j) * t.m + jp] =
          static_cast<long long>(std::floor(num / (2.0 * n * rho)));
    }
  }
  return ct;
}

CoarsenedTournament coarsen_matrix(const std::vector<double>& s, int m, double rho) {
  require(rho > 0.0, "precision rho must be positive");
  CoarsenedTournament ct{rho, m, std::vector<long long>(static_cast<std::size_t>(m) * m, 0)};
  for (int j = 0; j < m; ++j)
    for (int jp = 0; jp < m; ++jp)
      if (j != jp)
        ct.weights[static_cast<std::size_t>(j) * m + jp] =
            static_cast<long long>(std::floor((s[static_cast<std::size_t>(j) * m + jp] - 0.5) / rho));
  return ct;
}

RuleOutcome apply_rule(Rule r, const TallyStats& t, const RuleConfig& cfg) {
  const TieBreakOrder tb = cfg.tiebreak ? *cfg.tiebreak : TieBreakOrder::identity(t.m);
  switch (r) {
    case Rule::Plurality: return plurality(t, tb);
    case Rule::Borda: return borda(t, tb);
    case Rule::Copeland: return copeland(t, tb);
    case Rule::PluralityVeto: return plurality_veto(t, cfg.veto_order);
    case Rule::PrunedPluralityVeto: return pruned_plurality_veto(t, cfg.ppv_alpha, cfg.veto_order);
    case Rule::RandomDictator: return random_dictator(t);
    case Rule::MaximalLotteries: return maximal_lotteries(t, cfg.ml);
  }
  throw PreconditionError("unknown rule");
}

}  // namespace plvote
