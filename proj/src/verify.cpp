#include "plvote/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "plvote/constructions.hpp"
#include "plvote/distortion.hpp"
#include "plvote/pl_model.hpp"
#include "plvote/rng.hpp"
#include "plvote/sigmoid.hpp"

namespace plvote::verify {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

class Builder {
 public:
  explicit Builder(SuiteResult& r) : r_(r) {}
  bool add(std::string name, std::string expected, std::string observed, bool pass) {
    r_.checks.push_back({std::move(name), std::move(expected), std::move(observed), pass});
    return pass;
  }

 private:
  SuiteResult& r_;
};

// ---------------------------------------------------------------------------

void sigmoid_suite(Builder& b, const Options& opt) {
  const std::vector<double> betas{1, 2, 5, 10, 30};
  Stream rng(derive_key(opt.seed, 1));
  bool monotone = true, curvature = true, deriv_ok = true, max_ok = true, symmetric = true;
  double worst_rel = 0.0, worst_sym = 0.0;
  for (double beta : betas) {
    const double h = 1e-4 / beta;
    for (int i = 0; i < 1000; ++i) {
      const double x = 2.0 * rng.uniform() - 1.0;
      const double s = sigma(beta, x);
      // Evaluated on the small tail: sigma(x) = 1 - sigma(-x) keeps full precision.
      const double a = -std::abs(x);
      const double tail = sigma(beta, a);
      if (!(sigma(beta, a - h) < tail && tail < sigma(beta, a + h))) monotone = false;
      const double second = sigma(beta, a + h) + sigma(beta, a - h) - 2.0 * tail;
      // sigma is convex on x <= 0; by symmetry that is concavity on x >= 0.
      if (std::abs(x) >= h && second < -8.0 * std::numeric_limits<double>::epsilon() * tail) curvature = false;
      // Central difference taken on the small tail for precision.
      const double fd = x > 0.0 ? (sigma(beta, -x + h) - sigma(beta, -x - h)) / (2.0 * h)
                                : (sigma(beta, x + h) - sigma(beta, x - h)) / (2.0 * h);
      const double d = sigma_derivative(beta, x);
      const double rel = std::abs(fd - d) / d;
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-6) deriv_ok = false;
      if (d > beta / 4.0) max_ok = false;
      worst_sym = std::max(worst_sym, std::abs(s + sigma(beta, -x) - 1.0));
    }
    if (sigma_derivative(beta, 0.0) != beta / 4.0) max_ok = false;
  }
  symmetric = worst_sym <= 1e-15 && sigma(7.0, 0.0) == 0.5;
  b.add("increasing; concave on x>=0, convex on x<=0", "all 5000 points", monotone && curvature ? "ok" : "violated",
        monotone && curvature);
  b.add("derivative vs finite difference", "rel err <= 1e-6", num(worst_rel), deriv_ok);
  b.add("derivative max beta/4 at x=0", "sigma' <= beta/4", max_ok ? "ok" : "violated", max_ok);
  b.add("sigma(0)=1/2 and sigma(x)+sigma(-x)=1", "|err| <= 1e-15", num(worst_sym), symmetric);
  b.add("sigma_1(0.5)", "0.6224593312", num(sigma(1.0, 0.5)),
        std::abs(sigma(1.0, 0.5) - 0.6224593312018546) < 1e-12);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> permutations(int m) {
  std::vector<int> p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

double permutation_probability(const std::vector<int>& perm, const std::vector<double>& u, double beta) {
  double prob = 1.0;
  for (std::size_t pos = 0; pos < perm.size(); ++pos) {
    double total = 0.0;
    for (std::size_t k = pos; k < perm.size(); ++k) total += std::exp(beta * u[perm[k]]);
    prob *= std::exp(beta * u[perm[pos]]) / total;
  }
  return prob;
}

void sampler_suite(Builder& b, const Options& opt) {
  constexpr std::size_t kDraws = 1'000'000;
  const double beta = opt.beta.value_or(2.0);
  Stream urng(derive_key(opt.seed, 2));
  double min_p = 1.0, max_tv = 0.0;
  for (int m = 2; m <= 4; ++m) {
    const auto perms = permutations(m);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = i;
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<double> u(static_cast<std::size_t>(m));
      for (double& x : u) x = urng.uniform();
      std::vector<double> exact(perms.size());
      for (std::size_t i = 0; i < perms.size(); ++i) exact[i] = permutation_probability(perms[i], u, beta);

      std::vector<std::size_t> seq(perms.size(), 0), gum(perms.size(), 0);
      Stream s1(derive_key(opt.seed, 100 + m, rep)), s2(derive_key(opt.seed, 200 + m, rep));
      for (std::size_t d = 0; d < kDraws; ++d) {
        ++seq[index[sample_ranking_sequential(u, beta, s1).order]];
        ++gum[index[sample_ranking_gumbel(u, beta, s2).order]];
      }
      const boost::math::chi_squared dist(static_cast<double>(perms.size() - 1));
      double tv = 0.0;
      for (const auto* counts : {&seq, &gum}) {
        double chi2 = 0.0;
        for (std::size_t i = 0; i < perms.size(); ++i) {
          const double e = exact[i] * kDraws;
          chi2 += ((*counts)[i] - e) * ((*counts)[i] - e) / e;
        }
        const double pval = boost::math::cdf(boost::math::complement(dist, chi2));
        min_p = std::min(min_p, pval);
        b.add("chi-square m=" + std::to_string(m) + " vector " + std::to_string(rep) +
                  (counts == &seq ? " sequential" : " gumbel"),
              "p > 0.001", num(pval), pval > 0.001);
      }
      for (std::size_t i = 0; i < perms.size(); ++i)
        tv += std::abs(static_cast<double>(seq[i]) - static_cast<double>(gum[i]));
      tv /= 2.0 * kDraws;
      max_tv = std::max(max_tv, tv);
    }
  }
  b.add("sequential vs gumbel total variation", "< 0.01", num(max_tv), max_tv < 0.01);
}

// ---------------------------------------------------------------------------

void linearization_suite(Builder& b, const Options& opt) {
  const std::size_t count = opt.samples.value_or(100'000);
  Stream rng(derive_key(opt.seed, 3));
  std::size_t violations = 0, trivial_regime_bad = 0;
  double worst = -1e300;
  std::vector<double> x, z;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + rng.below(100);
    const double beta = 1.0 + 49.0 * rng.uniform();
    x.resize(n);
    z.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = rng.uniform();
      z[k] = rng.uniform();
    }
    const auto r = linearization_probe(x, z, beta);
    worst = std::max(worst, r.rhs - r.lhs);
    if (!r.holds) ++violations;
    if (r.rhs <= 0.0 && r.lhs < r.rhs - 1e-9) ++trivial_regime_bad;
  }
  const auto zero = linearization_probe({0.0, 0.0}, {0.0, 0.0}, 5.0);
  const auto eq = linearization_probe({0.3, 0.7}, {0.3, 0.7}, 5.0);
  b.add("random triples", "0 violations of " + std::to_string(count), std::to_string(violations),
        violations == 0);
  b.add("max (rhs - lhs)", "<= 1e-9", num(worst), worst <= 1e-9);
  b.add("sum x < sum z regime", "lhs >= rhs", std::to_string(trivial_regime_bad) + " failures",
        trivial_regime_bad == 0);
  b.add("x = z = 0", "lhs = rhs = 0", num(zero.lhs) + ", " + num(zero.rhs), zero.lhs == 0.0 && zero.rhs == 0.0);
  b.add("x = z", "rhs = 0 <= lhs", num(eq.lhs) + ", " + num(eq.rhs), eq.rhs == 0.0 && eq.lhs >= 0.0);
}

// ---------------------------------------------------------------------------

SweepConfig sweep_config(const Options& opt, double beta) {
  SweepConfig cfg;
  cfg.m_min = 2;
  cfg.m_max = 8;
  cfg.max_types = 6;
  cfg.beta = beta;
  cfg.samples = opt.samples.value_or(10'000);
  cfg.seed = derive_key(opt.seed, 4);  // identical instances across the sweep suites
  cfg.exec = opt.exec;
  return cfg;
}

void sweep_checks(Builder& b, const Options& opt, Rule rule) {
  for (double beta : {2.0, 5.0, 10.0}) {
    const SweepReport r = upper_bound_sweep(rule, sweep_config(opt, beta));
    b.add(std::string(rule_name(rule)) + " upper bound, beta=" + num(beta),
          "0 violations; ratio/bound <= 1",
          std::to_string(r.violations) + " violations; max ratio " + num(r.max_ratio) +
              "; max ratio/bound " + num(r.max_ratio_over_bound) + "; evaluated " +
              std::to_string(r.evaluated) + ", ambiguous " + std::to_string(r.ambiguous),
          r.violations == 0 && r.evaluated > 0);
  }
}

void upper_bounds_suite(Builder& b, const Options& opt) {
  sweep_checks(b, opt, Rule::Copeland);
  sweep_checks(b, opt, Rule::Borda);
}

// ---------------------------------------------------------------------------

void copeland_lb_suite(Builder& b, const Options& opt) {
  const double beta = opt.beta.value_or(30.0);
  const double eps = 0.1;
  const ConstructionReport r = construct_copeland_lb(beta, eps);
  const Candidate W = r.roles.at("W");
  const PopulationStats ps = population_stats(r.instance);
  const auto pop = population_winner(ps, Rule::Copeland, TieBreakOrder(r.tiebreak));
  b.add("population Copeland winner under W > Y > B", "W",
        pop.ambiguous ? "ambiguous" : (pop.outcome.winner() == W ? "W" : "other"),
        !pop.ambiguous && pop.outcome.winner() == W);
  b.add("margins p_WY, p_YB, p_BW", "all > 1/2",
        num(r.params.at("p_WY")) + ", " + num(r.params.at("p_YB")) + ", " + num(r.params.at("p_BW")),
        r.flags.at("margin_WY_above_half") && r.flags.at("margin_YB_above_half") &&
            r.flags.at("margin_BW_above_half"));
  b.add("p_WY and p_YB solved exactly", "1/2 + 1/beta to 1e-9",
        num(r.params.at("p_WY") - 0.5 - 1.0 / beta) + ", " + num(r.params.at("p_YB") - 0.5 - 1.0 / beta),
        std::abs(r.params.at("p_WY") - 0.5 - 1.0 / beta) < 1e-9 &&
            std::abs(r.params.at("p_YB") - 0.5 - 1.0 / beta) < 1e-9);
  b.add("population distortion matches closed form", "rel err <= 1e-9",
        num(r.population_distortion) + " vs " + num(r.closed_form_distortion),
        std::abs(r.population_distortion / r.closed_form_distortion - 1.0) <= 1e-9);
  b.add("population distortion", ">= (1-eps) beta = " + num((1.0 - eps) * beta),
        num(r.population_distortion), r.population_distortion >= (1.0 - eps) * beta);

  SimulationConfig cfg;
  cfg.n = 1'000'000;
  cfg.trials = 100;
  cfg.seed = derive_key(opt.seed, 5);
  cfg.rule_config.tiebreak = TieBreakOrder(r.tiebreak);
  cfg.exec = opt.exec;
  const auto est = empirical_distortion(r.instance, Rule::Copeland, cfg);
  b.add("simulated elections won by W (n=1e6)", ">= 99 of 100",
        std::to_string(est.wins[W]) + " of 100", est.wins[W] >= 99);
}

// ---------------------------------------------------------------------------

void plurality_lb_suite(Builder& b, const Options& opt) {
  const int m = 100;
  const double beta = opt.beta.value_or(3.0);
  const double eps = 0.1;
  const ConstructionReport r = construct_plurality_lb(m, beta, eps);
  const double gamma = r.params.at("gamma");
  const double closed = (1.0 - gamma) / gamma;
  b.add("predicted winner W with top share > 1/m", "> " + num(1.0 / m),
        num(r.params.at("top_share_W")),
        r.flags.at("W_top_share_above_1_over_m") && r.flags.at("W_population_plurality_winner"));
  b.add("population distortion vs (1-gamma)/gamma", "rel err <= 1e-9",
        num(r.population_distortion) + " vs " + num(closed),
        std::abs(r.population_distortion / closed - 1.0) <= 1e-9);
  b.add("distortion >= table lower bound", ">= " + num(r.lower_bound), num(r.population_distortion),
        r.population_distortion >= r.lower_bound * (1.0 - 1e-12));

  SimulationConfig cfg;
  cfg.n = 1'000'000;
  cfg.trials = 10;
  cfg.seed = derive_key(opt.seed, 6);
  cfg.exec = opt.exec;
  const auto est = empirical_distortion(r.instance, Rule::Plurality, cfg);
  const double slack = 1e-9 * closed;
  b.add("empirical distortion CI contains closed form (n=1e6, 10 trials)",
        num(closed) + " in CI",
        num(est.empirical_mean) + " [" + num(est.ci_lo) + ", " + num(est.ci_hi) + "]",
        est.has_ci && est.ci_lo - slack <= closed && closed <= est.ci_hi + slack);
  sweep_checks(b, opt, Rule::Plurality);
}

// ---------------------------------------------------------------------------

void random_dictator_suite(Builder& b, const Options& opt) {
  const int m = 20;
  const double eps = 0.2;
  const double beta = opt.beta.value_or(50.0);
  const ConstructionReport r = construct_rd_lb(m, beta, eps);
  // Independent closed form with q_B written in the un-normalised form.
  const double q_b = 1.0 / (std::exp(beta * eps) + 1.0 + (m - 2) * std::exp(-beta * (1.0 - eps)));
  const double closed = (1.0 - eps) / (q_b * (1.0 - eps) + (1.0 - q_b) / (m - 1));
  b.add("population distortion vs closed form", "within 1%",
        num(r.population_distortion) + " vs " + num(closed),
        std::abs(r.population_distortion / closed - 1.0) <= 0.01);
  b.add("population distortion", ">= 14.9", num(r.population_distortion),
        r.population_distortion >= 14.9);

  SimulationConfig cfg;
  cfg.n = 1'000'000;
  cfg.trials = 5;
  cfg.seed = derive_key(opt.seed, 7);
  cfg.exec = opt.exec;
  const auto est = empirical_distortion(r.instance, Rule::RandomDictator, cfg);
  const double half_width = std::max(est.ci_hi - est.empirical_mean, 1e-3 * closed);
  b.add("empirical distortion (n=1e6, 5 trials)", num(closed) + " within CI",
        num(est.empirical_mean) + " [" + num(est.ci_lo) + ", " + num(est.ci_hi) + "]",
        std::abs(est.empirical_mean - closed) <= half_width);
  sweep_checks(b, opt, Rule::RandomDictator);
}

// ---------------------------------------------------------------------------

void plurality_veto_suite(Builder& b, const Options& opt) {
  const int m = 400;
  const double beta = opt.beta.value_or(10.0);
  const double lnm = std::log(static_cast<double>(m));
  const BetaWindow w = pluralityveto_beta_window(m);
  b.add("beta window", "contains [7.77, 22.22]", "[" + num(w.lo) + ", " + num(w.hi) + "]",
        w.lo <= 7.77 && w.hi >= 22.22);
  const ConstructionReport r = construct_pluralityveto_lb(m, beta);
  std::string failed;
  for (const auto& [k, v] : r.flags)
    if (!v) failed += k + " ";
  b.add("validity flags", "all hold", failed.empty() ? "all hold" : failed, failed.empty());

  // Recomputed: per-voter bottom bound 1/(2(em)^{e^{-2/ln m}}) vs top bound 5/(4m).
  const double bottom = 0.5 * std::exp(-std::exp(-2.0 / lnm) * (1.0 + lnm));
  const double top = 1.25 / m;
  b.add("bottom bound exceeds top bound", "1/298.6 > 1/320",
        "1/" + num(1.0 / bottom) + " vs 1/" + num(1.0 / top), bottom > top);
  b.add("exact population top of B below top bound", "<= 1/320", "1/" + num(1.0 / r.params.at("top_B")),
        r.params.at("top_B") <= top);

  SimulationConfig cfg;
  cfg.n = 100'000;
  cfg.trials = 20;
  cfg.seed = derive_key(opt.seed, 8);
  cfg.rule_config.ppv_alpha = 1.0;
  cfg.exec = opt.exec;
  const auto est = simulate_rules(r.instance, {Rule::PluralityVeto, Rule::PrunedPluralityVeto}, cfg);
  const double lb = beta * lnm / 6.0;
  for (const auto& e : est) {
    b.add(e.rule + ": B wins (n=1e5, 20 trials)", "0", std::to_string(e.wins[0]), e.wins[0] == 0);
    b.add(e.rule + ": recorded distortion", ">= beta ln m / 6 = " + num(lb), num(e.empirical_mean),
          e.empirical_mean >= lb);
  }
}

// ---------------------------------------------------------------------------

void tournament_suite(Builder& b, const Options& opt) {
  const double rho = 0.05, eps = 0.1, gamma = 0.01;
  const ConstructionReport r = construct_tournament_lb(rho, eps, gamma, opt.beta);
  // Values derived by hand from the parameter formulas at gamma = 0.01.
  const double p = 0.0604 / 1.06, q = 0.0392 / 1.06, s = 0.5406 / 0.9996;
  b.add("p", num(p), num(r.params.at("p")), std::abs(r.params.at("p") - p) < 1e-12);
  b.add("q", num(q), num(r.params.at("q")), std::abs(r.params.at("q") - q) < 1e-12);
  b.add("s", num(s), num(r.params.at("s")), std::abs(r.params.at("s") - s) < 1e-12);
  b.add("beta0 from bisection (E < gamma/4)", "E < " + num(gamma / 4),
        "beta=" + num(r.params.at("beta")) + ", E=" + num(r.params.at("E")), r.flags.at("E_below_gamma_over_4"));
  const double lo = 0.5 + 0.75 * gamma, hi = 0.5 + 1.25 * gamma;
  b.add("population margins", "in (" + num(lo) + ", " + num(hi) + ")",
        num(r.params.at("p_WY")) + ", " + num(r.params.at("p_YB")) + ", " + num(r.params.at("p_BW")),
        r.flags.at("margin_WY_in_window") && r.flags.at("margin_YB_in_window") &&
            r.flags.at("margin_BW_in_window"));

  bool same = true, zero = true;
  const auto rel = cyclic_relabelings(r);
  const auto base = coarsen_matrix(population_stats(rel[0]).pairwise, 3, rho);
  for (const auto& inst : rel) {
    const auto ct = coarsen_matrix(population_stats(inst).pairwise, 3, rho);
    same = same && ct == base;
    zero = zero && ct.w(2, 1) == 0 && ct.w(1, 0) == 0 && ct.w(0, 2) == 0;
  }
  b.add("cyclic relabelings", "identical coarsened tournaments, cycle edges 0",
        std::string(same ? "identical" : "differ") + ", " + (zero ? "zero cycle" : "nonzero"), same && zero);

  const double limit = (5.0 - 3.0 * r.params.at("eta")) / 8.0;
  const double coeff = r.params.at("welfare_coefficient");
  b.add("welfare coefficient within O(gamma) of (5-3 eta)/8 = 0.575", "|C - limit| <= 2 gamma",
        num(coeff) + " (|diff| = " + num(std::abs(coeff - limit)) + ")",
        std::abs(limit - 0.575) < 1e-15 && std::abs(coeff - limit) <= 2.0 * gamma);
  std::string trend;
  bool bounded = true;
  double prev = 1e300;
  for (double g : {1e-2, 1e-3, 1e-4}) {
    const TournamentParams t = tournament_params(g, eps);
    const double c = (t.p * (1.0 - t.eta) + t.q) / (t.delta * (1.0 - t.p));
    const double d = std::abs(c - limit);
    bounded = bounded && d <= 2.0 * g && d < prev;
    prev = d;
    trend += num(d / g) + " ";
  }
  b.add("|C - limit| / gamma at gamma = 1e-2, 1e-3, 1e-4", "bounded by 2, error shrinking", trend, bounded);
}

// ---------------------------------------------------------------------------

void bound_table_suite(Builder& b, const Options&) {
  const double beta = 5.0, eps = 0.1;
  const int m = 10;
  const double eb = std::exp(beta), enb = std::exp(-beta);
  const double tb = beta * (eb + 1.0) / (eb - 1.0);
  auto close = [](double a, double x) { return std::abs(a - x) <= 1e-12 * std::max(1.0, std::abs(x)); };
  struct Row {
    Rule rule;
    std::optional<double> ub, lb;
  };
  const std::vector<Row> rows{
      {Rule::Borda, tb, beta},
      {Rule::Copeland, tb, (1.0 - eps) * beta},
      {Rule::Plurality, std::min(eb * eb / beta, m * eb / (std::log(9.0) + 2.0) + 1.0),
       std::min(eb / 2.1 - 1.0, m / 2.1 - 1.0)},
      {Rule::PluralityVeto, std::nullopt, beta * std::log(10.0) / 6.0},
      {Rule::PrunedPluralityVeto, std::nullopt, beta * std::log(10.0) / 6.0},
      {Rule::RandomDictator, m * eb, (1.0 - eps) * m},
  };
  for (const auto& row : rows) {
    const BoundReport br = tabulated_bounds(row.rule, beta, m, eps);
    const bool ub_ok = row.ub ? (br.upper_bound && close(*br.upper_bound, *row.ub)) : !br.upper_bound;
    const bool lb_ok = br.lower_bound && close(*br.lower_bound, *row.lb);
    b.add(br.rule + " bounds at beta=5, m=10",
          "UB " + (row.ub ? num(*row.ub) : std::string("none")) + ", LB " + num(*row.lb),
          "UB " + (br.upper_bound ? num(*br.upper_bound) : std::string("none")) + ", LB " +
              num(*br.lower_bound),
          ub_ok && lb_ok);
  }
  const double pclc = 0.5 * beta * (1.0 + enb) / (1.0 - enb);
  b.add("PCLC bound", num(pclc), num(pclc_bound(beta)), close(pclc_bound(beta), pclc));
  const auto cop = tabulated_bounds(Rule::Copeland, beta, m, eps);
  b.add("Copeland UB = 2 x PCLC bound", "exact equality", num(*cop.upper_bound) + " = 2 x " + num(cop.pclc_bound),
        *cop.upper_bound == 2.0 * cop.pclc_bound);
  b.add("Copeland UB at beta=5", "5.067836549", num(*cop.upper_bound), std::abs(*cop.upper_bound - 5.067836549) < 1e-9);
  b.add("PCLC bound at beta=10", "5.000454", num(pclc_bound(10.0)), std::abs(pclc_bound(10.0) - 5.000454) < 1e-6);
}

// ---------------------------------------------------------------------------

struct Entry {
  SuiteInfo info;
  void (*run)(Builder&, const Options&);
  double budget_seconds;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {{"sigmoid", 1, "sigmoid properties"}, sigmoid_suite, 1.0},
      {{"sampler", 2, "sampler fidelity"}, sampler_suite, 30.0},
      {{"linearization", 3, "linearization inequality"}, linearization_suite, 10.0},
      {{"upper-bounds", 4, "Copeland/Borda upper bound sweep"}, upper_bounds_suite, 300.0},
      {{"copeland-lb", 5, "Copeland lower bound"}, copeland_lb_suite, 120.0},
      {{"plurality-lb", 6, "Plurality lower bound"}, plurality_lb_suite, 120.0},
      {{"random-dictator", 7, "RandomDictator bounds"}, random_dictator_suite, 60.0},
      {{"plurality-veto", 8, "PluralityVeto lower bound"}, plurality_veto_suite, 600.0},
      {{"tournament", 9, "finite-precision tournament construction"}, tournament_suite, 60.0},
      {{"bound-table", 10, "bound table evaluator"}, bound_table_suite, 1.0},
  };
  return r;
}

}  // namespace

bool SuiteResult::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<SuiteInfo>& suites() {
  static const std::vector<SuiteInfo> s = [] {
    std::vector<SuiteInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return s;
}

std::optional<SuiteInfo> find_suite(const std::string& key) {
  for (const auto& s : suites())
    if (s.name == key || std::to_string(s.criterion) == key) return s;
  return std::nullopt;
}

SuiteResult run_suite(const std::string& name, const Options& opt) {
  const auto info = find_suite(name);
  require(info.has_value(), "unknown verify suite '" + name + "'");
  const Entry& e = *std::find_if(registry().begin(), registry().end(),
                                 [&](const Entry& x) { return x.info.name == info->name; });
  SuiteResult res;
  res.suite = e.info.name;
  res.title = e.info.title;
  Builder b(res);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    e.run(b, opt);
  } catch (const std::exception& ex) {
    b.add("suite completed", "no error", ex.what(), false);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  b.add("runtime", "< " + num(e.budget_seconds) + " s", num(res.seconds) + " s", res.seconds < e.budget_seconds);
  return res;
}

}  // namespace plvote::verify
