#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plvote/profile.hpp"

namespace plvote {

enum class Rule {
  Plurality,
  Borda,
  Copeland,
  PluralityVeto,
  PrunedPluralityVeto,
  RandomDictator,
  MaximalLotteries,
};

std::string_view rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view name);
bool needs_profile(Rule r);
TallyNeeds tally_needs(Rule r);

/// Strict priority over candidates; earlier entries win ties.
class TieBreakOrder {
 public:
  static TieBreakOrder identity(int m);
  explicit TieBreakOrder(std::vector<Candidate> priority);

  const std::vector<Candidate>& priority() const { return priority_; }
  /// True when a is preferred to b.
  bool prefers(Candidate a, Candidate b) const { return rank_[a] < rank_[b]; }
  int size() const { return static_cast<int>(priority_.size()); }

 private:
  std::vector<Candidate> priority_;
  std::vector<int> rank_;
};

/// Probability distribution over candidates plus optional per-candidate scores.
struct RuleOutcome {
  std::vector<double> lottery;
  std::vector<double> scores;

  /// Index of the point mass, or nullopt for a non-degenerate lottery.
  std::optional<Candidate> winner() const;
  static RuleOutcome point_mass(int m, Candidate c, std::vector<double> scores = {});
};

nlohmann::json to_json(const RuleOutcome& out, Rule rule, const TieBreakOrder& tb);

/// W(j,j') = floor((s_{j,j'} - 1/2) / rho); diagonal entries are 0 and unused.
struct CoarsenedTournament {
  double rho = 0.0;
  int m = 0;
  std::vector<long long> weights;

  long long w(int j, int jp) const { return weights[static_cast<std::size_t>(j) * m + jp]; }
  bool operator==(const CoarsenedTournament& o) const {
    return m == o.m && weights == o.weights;
  }
};

/// argmax over candidates with ties resolved by `tb`.
Candidate argmax_with_tiebreak(const std::vector<double>& scores, const TieBreakOrder& tb);

RuleOutcome plurality(const TallyStats& t, const TieBreakOrder& tb);
RuleOutcome borda(const TallyStats& t, const TieBreakOrder& tb);
RuleOutcome copeland(const TallyStats& t, const TieBreakOrder& tb);
RuleOutcome random_dictator(const TallyStats& t);

/// Veto order is a permutation of voter indices; empty means index order.
RuleOutcome plurality_veto(const TallyStats& t, const std::vector<std::size_t>& veto_order = {});
RuleOutcome pruned_plurality_veto(const TallyStats& t, double alpha,
                                  const std::vector<std::size_t>& veto_order = {});

struct MaximalLotteryOptions {
  double tolerance = 1e-6;
  long long max_iterations = 1'000'000;
};

/// Lottery L with min_j' sum_j L_j M_{j,j'} >= -tolerance for the antisymmetric
/// margin matrix M (row-major m x m). Closed forms for m <= 3, otherwise
/// regret matching with linearly weighted averaging.
std::vector<double> maximal_lottery(const std::vector<double>& margins, int m,
                                    const MaximalLotteryOptions& opt = {});

/// M_{j,j'} = s_{j,j'} - s_{j',j}, row-major m x m.
std::vector<double> margin_matrix(const TallyStats& t);

/// Exploitability of L against M: max_j' -(L M)_{j'}.
double lottery_gap(const std::vector<double>& lottery, const std::vector<double>& margins, int m);

RuleOutcome maximal_lotteries(const TallyStats& t, const MaximalLotteryOptions& opt = {});

CoarsenedTournament coarsen(const TallyStats& t, double rho);
CoarsenedTournament coarsen_matrix(const std::vector<double>& s, int m, double rho);

struct RuleConfig {
  std::optional<TieBreakOrder> tiebreak;  // identity when unset
  double ppv_alpha = 1.0;
  std::vector<std::size_t> veto_order;
  MaximalLotteryOptions ml;
};

RuleOutcome apply_rule(Rule r, const TallyStats& t, const RuleConfig& cfg = {});

}  // namespace plvote
