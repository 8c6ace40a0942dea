#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "plvote/constructions.hpp"
#include "plvote/distortion.hpp"
#include "plvote/rng.hpp"
#include "plvote/sigmoid.hpp"

using namespace plvote;

namespace {

Instance single_type(std::vector<double> u, double beta) {
  Instance inst;
  inst.m = static_cast<int>(u.size());
  inst.beta = beta;
  inst.types = {{1.0, std::move(u)}};
  return inst;
}

}  // namespace

TEST_CASE("lottery distortion edge cases") {
  CHECK(lottery_distortion({0, 0, 0}, {1, 0, 0}) == 1.0);
  CHECK(std::isinf(lottery_distortion({1, 0}, {0, 1})));
  CHECK(lottery_distortion({1, 0.5}, {0, 1}) == 2.0);
  CHECK(lottery_distortion({1, 0.5}, {0.5, 0.5}) == doctest::Approx(4.0 / 3));
}

TEST_CASE("identical utilities give distortion one for every rule") {
  const auto inst = single_type({0.3, 0.3, 0.3, 0.3}, 4.0);
  const auto ps = population_stats(inst);
  for (Rule r : {Rule::Plurality, Rule::Borda, Rule::Copeland}) {
    const auto pop = population_winner(ps, r, TieBreakOrder::identity(4));
    // Every score ties: the limit is ambiguous, and any winner has ratio 1.
    CHECK(pop.ambiguous);
  }
  SimulationConfig cfg;
  cfg.n = 200;
  cfg.trials = 3;
  for (const auto& e : simulate_rules(inst, {Rule::Plurality, Rule::PluralityVeto, Rule::MaximalLotteries}, cfg))
    CHECK(e.empirical_mean == doctest::Approx(1.0));
}

TEST_CASE("population winner ambiguity threshold") {
  // Two candidates with utilities differing by x: top share is sigma(x).
  const auto clear = population_stats(single_type({0.2, 0.0}, 5.0));
  auto out = population_winner(clear, Rule::Plurality, TieBreakOrder::identity(2));
  CHECK_FALSE(out.ambiguous);
  CHECK(out.outcome.winner() == 0);
  CHECK(out.decisive_margin == doctest::Approx(2 * sigma(5.0, 0.2) - 1));
  const auto close = population_stats(single_type({1e-8, 0.0}, 5.0));
  out = population_winner(close, Rule::Copeland, TieBreakOrder::identity(2));
  CHECK(out.ambiguous);
  out = population_winner(close, Rule::Copeland, TieBreakOrder::identity(2), 0.0);
  CHECK_FALSE(out.ambiguous);
}

TEST_CASE("veto limit probe") {
  // Candidate 0 is everyone's last choice by a wide gap.
  const auto ps = population_stats(single_type({0.0, 1.0, 1.0}, 10.0));
  const auto probe = veto_limit_probe(ps, 0);
  CHECK(probe.loses);
  CHECK(probe.bottom > probe.top);
  const auto fav = veto_limit_probe(ps, 1);
  CHECK_FALSE(fav.loses);
}

TEST_CASE("two-candidate ratio bound") {
  Stream rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    Instance inst;
    inst.m = 2;
    inst.beta = 1.0 + 20.0 * rng.uniform();
    const int types = 1 + static_cast<int>(rng.below(4));
    for (int k = 0; k < types; ++k)
      inst.types.push_back({1.0 / types, {rng.uniform(), rng.uniform()}});
    const auto ps = population_stats(inst);
    const auto r = two_candidate_probe(ps, inst.beta, 0, 1);
    CHECK(r.holds);
    CHECK(two_candidate_probe(ps, inst.beta, 1, 0).holds);
  }
  // A grid of single types: the ratio bound is approached but not crossed.
  for (double beta : {1.0, 4.0, 16.0})
    for (double ux = 0.0; ux <= 1.0; ux += 0.05)
      for (double uz = 0.0; uz <= 1.0; uz += 0.05) {
        const auto ps = population_stats(single_type({ux, uz}, beta));
        CHECK(two_candidate_probe(ps, beta, 0, 1).holds);
      }
}

TEST_CASE("linearization inequality") {
  Stream rng(11);
  for (int rep = 0; rep < 2000; ++rep) {
    const double beta = 0.1 + 30.0 * rng.uniform();
    const std::size_t k = 1 + rng.below(6);
    std::vector<double> x(k), z(k);
    for (std::size_t i = 0; i < k; ++i) {
      x[i] = rng.uniform();
      z[i] = rng.uniform() * x[i];  // 0 <= z <= x
    }
    CHECK(linearization_probe(x, z, beta).holds);
  }
  const auto zero = linearization_probe({0, 0}, {0, 0}, 3.0);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK_THROWS_AS(linearization_probe({0.1}, {0.1, 0.2}, 3.0), PreconditionError);
}

TEST_CASE("bound formulas") {
  for (double beta : {0.5, 2.0, 10.0, 50.0}) {
    CHECK(tournament_upper_bound(beta) == doctest::Approx(2 * pclc_bound(beta)));
    CHECK(pclc_bound(beta) >= 1.0);
  }
  CHECK(pclc_bound(50.0) == doctest::Approx(25.0).epsilon(1e-12));
  const auto cop = tabulated_bounds(Rule::Copeland, 10.0, 3);
  REQUIRE(cop.upper_bound);
  CHECK(*cop.upper_bound == doctest::Approx(tournament_upper_bound(10.0)));
  BoundReport b = cop;
  b.observe(1.0);
  CHECK(b.satisfied == true);
  b.observe(*cop.upper_bound * 1.01);
  CHECK(b.satisfied == false);
  CHECK_THROWS(tabulated_bounds(Rule::MaximalLotteries, 10.0, 3));
}

TEST_CASE("sweep is independent of the execution policy") {
  SweepConfig cfg;
  cfg.samples = 300;
  cfg.seed = 99;
  cfg.beta = 3.0;
  for (Rule r : {Rule::Plurality, Rule::Copeland, Rule::RandomDictator}) {
    cfg.exec = Exec::Serial;
    const auto a = upper_bound_sweep(r, cfg);
    cfg.exec = Exec::Parallel;
    const auto b = upper_bound_sweep(r, cfg);
    CHECK(a.evaluated == b.evaluated);
    CHECK(a.ambiguous == b.ambiguous);
    CHECK(a.max_ratio == b.max_ratio);
    CHECK(a.violating_samples == b.violating_samples);
    CHECK(a.violations == 0);
  }
  // The same index always yields the same instance.
  CHECK(to_json(random_sweep_instance(cfg, 17)) == to_json(random_sweep_instance(cfg, 17)));
}

TEST_CASE("all-zero utilities") {
  const auto inst = single_type({0.0, 0.0, 0.0}, 2.0);
  SimulationConfig cfg;
  cfg.n = 50;
  const auto est = empirical_distortion(inst, Rule::Borda, cfg);
  CHECK(est.empirical_mean == 1.0);
  CHECK_FALSE(est.unbounded);
}

TEST_CASE("pairwise Condorcet loser probe") {
  const auto loser = single_type({0.0, 1.0, 0.9}, 10.0);
  SimulationConfig cfg;
  cfg.n = 501;
  cfg.trials = 20;
  const auto rep = pclc_probe(loser, Rule::Copeland, cfg);
  REQUIRE(rep.precondition_ok);
  CHECK(rep.condorcet_loser == 0);
  CHECK(rep.below_threshold);
  // No Condorcet loser in a symmetric instance.
  CHECK_FALSE(pclc_probe(single_type({0.5, 0.5, 0.5}, 10.0), Rule::Copeland, cfg).precondition_ok);
}

TEST_CASE("empirical distortion approaches the population value") {
  const auto r = construct_rd_lb(5, 4.0, 0.1);
  double prev_err = std::numeric_limits<double>::infinity();
  for (std::size_t n : {1000u, 100000u}) {
    SimulationConfig cfg;
    cfg.n = n;
    cfg.trials = 10;
    cfg.seed = 5;
    const auto est = empirical_distortion(r.instance, Rule::RandomDictator, cfg);
    REQUIRE(est.population_value);
    const double err = std::abs(est.empirical_mean - *est.population_value);
    CHECK(err < prev_err + 1e-3);
    prev_err = err;
  }
  CHECK(prev_err < 0.01 * r.population_distortion);
}

TEST_CASE("distortion is invariant to utility scale") {
  auto a = construct_rd_lb(4, 3.0, 0.2).instance;
  auto b = a;
  // Scaling utilities by c and beta by 1/c leaves the sampled rankings unchanged.
  for (auto& t : b.types)
    for (double& u : t.utilities) u *= 0.25;
  b.beta *= 4.0;
  SimulationConfig cfg;
  cfg.n = 2000;
  cfg.trials = 4;
  cfg.seed = 21;
  for (Rule r : {Rule::Plurality, Rule::Borda, Rule::RandomDictator}) {
    const auto ea = empirical_distortion(a, r, cfg);
    const auto eb = empirical_distortion(b, r, cfg);
    CHECK(ea.empirical_mean == doctest::Approx(eb.empirical_mean).epsilon(1e-9));
  }
}

TEST_CASE("serial and parallel simulation agree") {
  const auto r = construct_plurality_lb(8, 2.0, 0.1);
  SimulationConfig cfg;
  cfg.n = 3000;
  cfg.trials = 6;
  cfg.seed = 8;
  const std::vector<Rule> rules{Rule::Plurality, Rule::PluralityVeto, Rule::Copeland};
  cfg.exec = Exec::Serial;
  const auto a = simulate_rules(r.instance, rules, cfg);
  cfg.exec = Exec::Parallel;
  const auto b = simulate_rules(r.instance, rules, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].outcome_utils == b[i].outcome_utils);
    CHECK(a[i].wins == b[i].wins);
  }
}
