#include "plvote/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plvote/common.hpp"
#include "plvote/distortion.hpp"
#include "plvote/pl_model.hpp"
#include "plvote/rules.hpp"
#include "plvote/sigmoid.hpp"

namespace plvote {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Smallest x in [lo, hi] with pred(x) true, given pred monotone false -> true.
template <class Pred>
double bisect(double lo, double hi, Pred pred) {
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

double population_ratio(const PopulationStats& ps, Candidate winner) {
  const double best = *std::max_element(ps.util.begin(), ps.util.end());
  return best / ps.util[winner];
}

}  // namespace

bool ConstructionReport::all_flags() const {
  return std::all_of(flags.begin(), flags.end(), [](const auto& kv) { return kv.second; });
}

nlohmann::json to_json(const ConstructionReport& r) {
  nlohmann::json j;
  j["family"] = r.family;
  j["instance"] = to_json(r.instance);
  j["predicted_winner"] = r.predicted_winner ? nlohmann::json(*r.predicted_winner) : nlohmann::json();
  j["optimal_candidate"] = r.optimal_candidate;
  j["target_rule"] = r.target_rule;
  j["predicted_outcome"] = r.predicted_outcome;
  j["population_distortion"] = r.population_distortion;
  j["closed_form_distortion"] = r.closed_form_distortion;
  j["lower_bound"] = r.lower_bound;
  j["roles"] = r.roles;
  j["internal_params"] = r.params;
  j["validity_flags"] = r.flags;
  j["tiebreak"] = r.tiebreak;
  return j;
}

ConstructionReport construct_rd_lb(int m, double beta, double epsilon) {
  require(m >= 3, "RD-LB needs m >= 3");
  const double eps_max = static_cast<double>(m - 2) / (m - 1);
  require(epsilon > 0.0 && epsilon < eps_max,
          "RD-LB needs epsilon in (0, (m-2)/(m-1)) = (0, " + fmt(eps_max) + ")");

  ConstructionReport r;
  r.family = "rd";
  r.target_rule = "random_dictator";
  r.predicted_outcome = "lottery equal to population top shares";
  r.optimal_candidate = 0;
  r.roles = {{"B", 0}};
  Instance& inst = r.instance;
  inst.m = m;
  inst.beta = beta;
  for (int k = 1; k < m; ++k) {
    std::vector<double> u(static_cast<std::size_t>(m), 0.0);
    u[0] = 1.0 - epsilon;
    u[k] = 1.0;
    inst.types.push_back({1.0 / (m - 1), std::move(u)});
  }
  inst.validate();

  const double eb = std::exp(-beta * epsilon);  // e^{beta(1-eps)} / e^beta
  const double q_b = eb / (eb + 1.0 + (m - 2) * std::exp(-beta));
  const double util_b = 1.0 - epsilon;
  const double util_k = 1.0 / (m - 1);
  r.closed_form_distortion = util_b / (q_b * util_b + (1.0 - q_b) * util_k);

  const PopulationStats ps = population_stats(inst);
  r.population_distortion = lottery_distortion(ps.util, ps.top);
  r.lower_bound = (1.0 - epsilon) * m;
  r.params = {{"epsilon", epsilon}, {"beta", beta}, {"q_B", q_b}, {"util_B", util_b},
              {"util_k", util_k}, {"limit_distortion", (1.0 - epsilon) * (m - 1)}};
  r.flags = {{"B_optimal", util_b > util_k},
             {"population_matches_closed_form",
              std::abs(r.population_distortion / r.closed_form_distortion - 1.0) <= 1e-9}};
  return r;
}

ConstructionReport construct_plurality_lb(int m, double beta, double epsilon) {
  require(m >= 4, "Plurality-LB needs m >= 4");
  require(beta >= std::log(4.0), "Plurality-LB needs beta >= ln 4");
  require(epsilon > 0.0, "Plurality-LB needs epsilon > 0");
  const double eb = std::exp(beta);
  const double gamma = eb <= m ? (2.0 + epsilon) / eb : (2.0 + epsilon) / m;
  require(gamma < 1.0, "Plurality-LB needs gamma = " + fmt(gamma) + " < 1");

  ConstructionReport r;
  r.family = "plurality";
  r.target_rule = "plurality";
  r.predicted_winner = 0;
  r.optimal_candidate = 1;
  r.roles = {{"W", 0}};
  r.predicted_outcome = "W wins";
  Instance& inst = r.instance;
  inst.m = m;
  inst.beta = beta;
  std::vector<double> t1(static_cast<std::size_t>(m), 0.0), t2(static_cast<std::size_t>(m), 1.0);
  t1[0] = 1.0;
  t2[0] = 0.0;
  inst.types = {{gamma, t1}, {1.0 - gamma, t2}};
  inst.validate();

  const PopulationStats ps = population_stats(inst);
  const double share_w = ps.top[0];
  const auto tb = TieBreakOrder::identity(m);
  const auto pop = population_winner(ps, Rule::Plurality, tb);
  r.closed_form_distortion = (1.0 - gamma) / gamma;
  r.population_distortion = population_ratio(ps, 0);
  r.lower_bound = std::min(eb / (2.0 + epsilon) - 1.0, m / (2.0 + epsilon) - 1.0);
  r.params = {{"epsilon", epsilon}, {"beta", beta}, {"gamma", gamma}, {"top_share_W", share_w}};
  r.flags = {{"W_top_share_above_1_over_m", share_w > 1.0 / m},
             {"W_population_plurality_winner", !pop.ambiguous && pop.outcome.winner() == 0}};
  return r;
}

BetaWindow pluralityveto_beta_window(int m) {
  require(m >= 10, "PluralityVeto-LB needs m >= 10");
  const double lnm = std::log(static_cast<double>(m));
  const double c = 2.0 * std::log(lnm);
  // beta - 2 ln beta is increasing for beta > 2.
  BetaWindow w;
  w.hi = m / (3.0 * lnm);
  double hi = 4.0;
  while (hi - 2.0 * std::log(hi) < c) hi *= 2.0;
  w.lo = bisect(2.0, hi, [c](double b) { return b - 2.0 * std::log(b) >= c; });
  return w;
}

ConstructionReport construct_pluralityveto_lb(int m, double beta) {
  require(m >= 10, "PluralityVeto-LB needs m >= 10");
  const double lnm = std::log(static_cast<double>(m));
  const bool upper = beta <= m / (3.0 * lnm);
  const bool lower = beta >= 2.0 * std::log(beta) + 2.0 * std::log(lnm);
  require(upper, "PluralityVeto-LB condition beta <= m/(3 ln m) = " + fmt(m / (3.0 * lnm)) +
                     " fails at beta = " + fmt(beta));
  require(lower, "PluralityVeto-LB condition beta >= 2 ln beta + 2 ln ln m fails at beta = " +
                     fmt(beta));
  const int k = static_cast<int>(std::floor((m - 1) / (beta * lnm)));
  require(k >= 1, "PluralityVeto-LB subset size floor((m-1)/(beta ln m)) is 0");

  ConstructionReport r;
  r.family = "plurality_veto";
  r.target_rule = "plurality_veto";
  r.predicted_outcome = "B loses";
  r.optimal_candidate = 0;
  r.roles = {{"B", 0}};
  Instance& inst = r.instance;
  inst.m = m;
  inst.beta = beta;
  const double low_u = 2.0 / (beta * lnm);
  std::vector<double> t1(static_cast<std::size_t>(m), low_u);
  t1[0] = 0.0;
  inst.types = {{0.5, t1}};
  inst.families = {{0.5, 0, 0.5, 1.0, 0.0, k}};
  inst.validate();

  const PopulationStats ps = population_stats(inst);
  // Per-voter top share of B, its bound, and the bottom-vote lower bound.
  const double top_bound = 5.0 / (4.0 * m);
  const double bottom_bound = 1.0 / (2.0 * std::pow(std::exp(1.0) * m, std::exp(-2.0 / lnm)));
  const double type1_bottom = bottom_prob_equal_others(m, 0.0, low_u, beta);
  const VetoProbe probe = veto_limit_probe(ps, 0);

  const double util_other = ps.util[1];
  r.closed_form_distortion = 0.25 / (1.0 / (beta * lnm) + 0.5 * k / (m - 1));
  r.population_distortion = ps.util[0] / util_other;
  r.lower_bound = beta * lnm / 6.0;
  r.params = {{"beta", beta},
              {"k", k},
              {"top_B", ps.top[0]},
              {"top_bound", top_bound},
              {"bottom_bound", bottom_bound},
              {"type1_bottom_B", type1_bottom},
              {"bottom_B", ps.has_bottom() ? ps.bottom[0] : 0.5 * type1_bottom},
              {"util_B", ps.util[0]},
              {"util_other", util_other},
              {"relaxed_condition_holds", beta >= 3.0 * (1.0 + std::log(lnm)) ? 1.0 : 0.0}};
  r.flags = {{"beta_le_m_over_3lnm", upper},
             {"beta_ge_2lnbeta_plus_2lnlnm", lower},
             {"floor_k_ge_2m_over_3betalnm", k >= 2.0 * m / (3.0 * beta * lnm)},
             {"top_B_le_5_over_4m", ps.top[0] <= top_bound},
             {"bottom_bound_exceeds_top_bound", bottom_bound > top_bound},
             {"B_loses_population_veto", probe.loses},
             {"util_B_is_quarter", std::abs(ps.util[0] - 0.25) <= 1e-12},
             {"util_other_le_3_over_2betalnm", util_other <= 1.5 / (beta * lnm) + 1e-15}};
  return r;
}

ConstructionReport construct_copeland_lb(double beta, double epsilon) {
  require(epsilon > 0.0 && epsilon < 0.25, "Copeland-LB needs epsilon in (0, 1/4)");
  require(beta >= 1.0, "Copeland-LB needs beta >= 1");
  const double eta = epsilon;
  const double delta = std::sqrt(3.0 * epsilon);
  const double eps_prime = 1.0 / beta;
  const double s_d = sigma(beta, delta / beta);
  const double s_m1 = sigma(beta, -1.0);
  const double p = (s_d - 0.5 - eps_prime) / (s_d - s_m1);
  const double q = (p * (sigma(beta, eta) - 0.5) - eps_prime) / (0.5 - s_m1);
  const std::string at = " at beta = " + fmt(beta) + " (beta too small)";
  require(p > 0.0 && p < 1.0, "Copeland-LB: p = " + fmt(p) + " outside (0,1)" + at);
  require(q > 0.0 && q < 1.0, "Copeland-LB: q = " + fmt(q) + " outside (0,1)" + at);
  require(p + q < 1.0, "Copeland-LB: p + q >= 1" + at);

  constexpr Candidate B = 0, Y = 1, W = 2;
  ConstructionReport r;
  r.family = "copeland";
  r.target_rule = "copeland";
  r.predicted_winner = W;
  r.predicted_outcome = "W wins by tie-break";
  r.optimal_candidate = B;
  r.roles = {{"B", B}, {"Y", Y}, {"W", W}};
  r.tiebreak = {W, Y, B};
  Instance& inst = r.instance;
  inst.m = 3;
  inst.beta = beta;
  inst.types = {{p, {1.0 - eta, 1.0, 0.0}},
                {q, {1.0, 0.0, delta / beta}},
                {1.0 - p - q, {0.0, 0.0, delta / beta}}};
  inst.validate();

  const PopulationStats ps = population_stats(inst);
  const double m_wy = ps.p(W, Y), m_yb = ps.p(Y, B), m_bw = ps.p(B, W);
  require(m_wy > 0.5 && m_yb > 0.5 && m_bw > 0.5,
          "Copeland-LB: a population margin is <= 1/2" + at);
  const auto pop = population_winner(ps, Rule::Copeland, TieBreakOrder(r.tiebreak));

  r.closed_form_distortion = beta * (p * (1.0 - eta) + q) / (delta * (1.0 - p));
  r.population_distortion = population_ratio(ps, W);
  r.lower_bound = (1.0 - epsilon) * beta;
  const double alpha = delta * (1.0 - delta * delta / 12.0);
  r.params = {{"beta", beta},   {"epsilon", epsilon}, {"eta", eta},       {"delta", delta},
              {"eps_prime", eps_prime}, {"p", p},     {"q", q},           {"p_WY", m_wy},
              {"p_YB", m_yb},   {"p_BW", m_bw},       {"p_limit", alpha / (2.0 + alpha)},
              {"ratio_limit", (1.0 - delta * delta / 12.0) * (1.0 - eta / 2.0)}};
  r.flags = {{"p_q_feasible", p > 0.0 && q > 0.0 && p + q <= 1.0},
             {"margin_WY_above_half", m_wy > 0.5},
             {"margin_YB_above_half", m_yb > 0.5},
             {"margin_BW_above_half", m_bw > 0.5},
             {"W_population_copeland_winner", !pop.ambiguous && pop.outcome.winner() == W}};
  return r;
}

double tournament_error_term(double beta, double eta, double delta) {
  return std::exp(-beta) + std::exp(-beta * eta) + std::exp(-beta * (1.0 - eta)) +
         std::exp(-beta + delta);
}

TournamentParams tournament_params(double gamma, double epsilon) {
  require(gamma > 0.0 && gamma < 0.5, "tournament construction needs gamma in (0, 1/2)");
  require(epsilon > 0.0 && epsilon < 0.75, "tournament construction needs epsilon in (0, 3/4)");
  TournamentParams t{};
  t.eta = 4.0 * epsilon / 3.0;
  const double g2 = gamma * gamma;
  t.p = (6.0 * gamma + 4.0 * g2) / (1.0 + 6.0 * gamma);
  t.q = (4.0 * gamma - 8.0 * g2) / (1.0 + 6.0 * gamma);
  t.s = (0.5 + 4.0 * gamma + 6.0 * g2) / (1.0 - 4.0 * g2);
  require(t.s > 0.5 && t.s < 1.0, "tournament construction: s outside (1/2, 1)");
  t.delta = std::log(t.s / (1.0 - t.s));
  return t;
}

double tournament_beta0(double gamma, double epsilon) {
  const TournamentParams t = tournament_params(gamma, epsilon);
  const double target = gamma / 4.0;
  auto ok = [&](double b) { return tournament_error_term(b, t.eta, t.delta) < target; };
  if (ok(1.0)) return 1.0;
  double hi = 2.0;
  while (!ok(hi)) {
    hi *= 2.0;
    require(hi < 1e9, "tournament construction: no beta achieves E < gamma/4");
  }
  return bisect(hi / 2.0, hi, ok);
}

double default_tournament_gamma(double rho) {
  return 0.01 * std::min(1.0, 0.9 * 2.0 * rho / 3.0);
}

ConstructionReport construct_tournament_lb(double rho, double epsilon, double gamma,
                                           std::optional<double> beta_opt) {
  require(rho > 0.0, "tournament construction needs rho > 0");
  require(gamma > 0.0 && gamma < 2.0 * rho / 3.0,
          "tournament construction needs gamma in (0, 2 rho/3) = (0, " + fmt(2.0 * rho / 3.0) +
              "), got " + fmt(gamma));
  const TournamentParams t = tournament_params(gamma, epsilon);
  require(t.eta < 1.0, "tournament construction needs eta = 4 epsilon/3 < 1");
  const double beta0 = tournament_beta0(gamma, epsilon);
  const double beta = beta_opt.value_or(beta0);
  const double err = tournament_error_term(beta, t.eta, t.delta);
  require(err < gamma / 4.0, "tournament construction: E(beta, eta, delta) = " + fmt(err) +
                                 " >= gamma/4 at beta = " + fmt(beta) + "; need beta >= " +
                                 fmt(beta0));
  require(t.delta / beta <= 1.0, "tournament construction needs delta/beta <= 1");

  constexpr Candidate B = 0, Y = 1, W = 2;
  ConstructionReport r;
  r.family = "tournament";
  r.target_rule = "finite_precision_tournament";
  r.predicted_winner = W;
  r.predicted_outcome = "symmetric coarsened 3-cycle; W selected in one relabeling";
  r.optimal_candidate = B;
  r.roles = {{"B", B}, {"Y", Y}, {"W", W}};
  r.tiebreak = {W, Y, B};
  Instance& inst = r.instance;
  inst.m = 3;
  inst.beta = beta;
  const double uw = t.delta / beta;
  inst.types = {{t.p, {1.0 - t.eta, 1.0, 0.0}},
                {t.q, {1.0, 0.0, uw}},
                {1.0 - t.p - t.q, {0.0, 0.0, uw}}};
  inst.validate();

  const PopulationStats ps = population_stats(inst);
  const double lo = 0.5 + 0.75 * gamma, hi = 0.5 + 1.25 * gamma;
  auto in_window = [&](double x) { return x > lo && x < hi; };
  const double m_wy = ps.p(W, Y), m_yb = ps.p(Y, B), m_bw = ps.p(B, W);

  bool zero_cycle = true, relabel_equal = true;
  const auto base = coarsen_matrix(ps.pairwise, 3, rho);
  for (const Instance& rel : cyclic_relabelings(r)) {
    const auto ct = coarsen_matrix(population_stats(rel).pairwise, 3, rho);
    relabel_equal = relabel_equal && ct == base;
  }
  zero_cycle = base.w(W, Y) == 0 && base.w(Y, B) == 0 && base.w(B, W) == 0;

  const double coeff = (t.p * (1.0 - t.eta) + t.q) / (t.delta * (1.0 - t.p));
  r.closed_form_distortion = beta * coeff;
  r.population_distortion = population_ratio(ps, W);
  r.lower_bound = (5.0 / 8.0 - epsilon) * beta;
  r.params = {{"rho", rho},
              {"epsilon", epsilon},
              {"gamma", gamma},
              {"beta", beta},
              {"beta0", beta0},
              {"eta", t.eta},
              {"p", t.p},
              {"q", t.q},
              {"s", t.s},
              {"delta", t.delta},
              {"E", err},
              {"p_WY", m_wy},
              {"p_YB", m_yb},
              {"p_BW", m_bw},
              {"welfare_coefficient", coeff},
              {"coefficient_limit", (5.0 - 3.0 * t.eta) / 8.0},
              {"hoeffding_n_alpha_0.05", 32.0 / (gamma * gamma) * std::log(6.0 / 0.05)}};
  r.flags = {{"gamma_below_2rho_over_3", gamma < 2.0 * rho / 3.0},
             {"E_below_gamma_over_4", err < gamma / 4.0},
             {"p_q_feasible", t.p > 0.0 && t.q > 0.0 && t.p + t.q < 1.0},
             {"delta_in_unit_interval", t.delta > 0.0 && t.delta <= 1.0},
             {"margin_WY_in_window", in_window(m_wy)},
             {"margin_YB_in_window", in_window(m_yb)},
             {"margin_BW_in_window", in_window(m_bw)},
             {"coarsened_zero_cycle", zero_cycle},
             {"relabelings_share_tournament", relabel_equal}};
  return r;
}

std::array<Instance, 3> cyclic_relabelings(const ConstructionReport& r) {
  require(r.instance.m == 3 && r.instance.families.empty(),
          "cyclic relabelings apply to three-candidate fixed-type instances");
  std::array<Instance, 3> out;
  for (int k = 0; k < 3; ++k) {
    Instance inst = r.instance;
    for (auto& t : inst.types) {
      std::vector<double> u(3);
      for (int j = 0; j < 3; ++j) u[(j + k) % 3] = t.utilities[j];
      t.utilities = std::move(u);
    }
    out[k] = std::move(inst);
  }
  return out;
}

}  // namespace plvote
