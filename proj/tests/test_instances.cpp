#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "plvote/constructions.hpp"
#include "plvote/distortion.hpp"
#include "plvote/population.hpp"
#include "plvote/rules.hpp"

using namespace plvote;

TEST_CASE("constructors reject invalid parameters") {
  CHECK_THROWS_AS(construct_rd_lb(2, 5.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(construct_rd_lb(4, 5.0, 0.7), PreconditionError);  // (m-2)/(m-1) = 2/3
  CHECK_THROWS_AS(construct_rd_lb(4, 5.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(construct_plurality_lb(3, 5.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(construct_plurality_lb(10, 1.0, 0.1), PreconditionError);  // beta < ln 4
  CHECK_THROWS_AS(construct_pluralityveto_lb(9, 5.0), PreconditionError);
  CHECK_THROWS_AS(construct_pluralityveto_lb(400, 30.0), PreconditionError);  // above m/(3 ln m)
  CHECK_THROWS_AS(construct_pluralityveto_lb(400, 5.0), PreconditionError);   // below the window
  CHECK_THROWS_AS(construct_copeland_lb(10.0, 0.3), PreconditionError);
  CHECK_THROWS_AS(construct_copeland_lb(1.0, 0.1), PreconditionError);  // margins collapse
  CHECK_THROWS_AS(construct_copeland_lb(10.0, 0.1), PreconditionError);  // q < 0
  CHECK_THROWS_AS(construct_tournament_lb(0.05, 0.1, 0.04, std::nullopt), PreconditionError);
  CHECK_THROWS_AS(construct_tournament_lb(0.05, 0.1, 0.01, 5.0), PreconditionError);
}

TEST_CASE("error messages name the failed condition") {
  try {
    construct_pluralityveto_lb(400, 30.0);
    FAIL("expected rejection");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("m/(3 ln m)") != std::string::npos);
  }
  try {
    construct_tournament_lb(0.05, 0.1, 0.01, 5.0);
    FAIL("expected rejection");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("need beta >=") != std::string::npos);
  }
}

TEST_CASE("random dictator construction") {
  for (int m : {3, 5, 12}) {
    for (double beta : {1.0, 5.0, 20.0}) {
      const double eps = 0.1;
      const auto r = construct_rd_lb(m, beta, eps);
      // Softmax share of B for one type, computed directly.
      const double wb = std::exp(beta * (1 - eps)), wk = std::exp(beta);
      const double q = wb / (wb + wk + (m - 2));
      const double util_b = 1 - eps, util_k = 1.0 / (m - 1);
      const double expected = util_b / (q * util_b + (1 - q) * util_k);
      CHECK(r.closed_form_distortion == doctest::Approx(expected).epsilon(1e-12));
      CHECK(r.population_distortion == doctest::Approx(expected).epsilon(1e-9));
      CHECK(r.all_flags());
    }
  }
  // Large beta approaches (1-eps)(m-1).
  const auto r = construct_rd_lb(6, 300.0, 0.1);
  CHECK(r.closed_form_distortion == doctest::Approx(0.9 * 5).epsilon(1e-9));
}

TEST_CASE("plurality construction") {
  // e^beta <= m branch.
  auto r = construct_plurality_lb(100, 3.0, 0.1);
  double gamma = 2.1 / std::exp(3.0);
  CHECK(r.params.at("gamma") == doctest::Approx(gamma));
  CHECK(r.closed_form_distortion == doctest::Approx((1 - gamma) / gamma));
  CHECK(r.population_distortion == doctest::Approx((1 - gamma) / gamma).epsilon(1e-12));
  // e^beta > m branch.
  r = construct_plurality_lb(20, 8.0, 0.1);
  gamma = 2.1 / 20;
  CHECK(r.params.at("gamma") == doctest::Approx(gamma));
  const double eb = std::exp(8.0);
  const double share = gamma * eb / (eb + 19) + (1 - gamma) / (1 + 19 * eb);
  CHECK(r.params.at("top_share_W") == doctest::Approx(share).epsilon(1e-12));
  CHECK(r.all_flags());
  CHECK(r.population_distortion >= r.lower_bound);
}

TEST_CASE("plurality veto construction") {
  const int m = 400;
  const auto w = pluralityveto_beta_window(m);
  CHECK(w.lo < w.hi);
  CHECK(w.lo - 2 * std::log(w.lo) == doctest::Approx(2 * std::log(std::log(400.0))).epsilon(1e-9));
  for (double beta : {8.0, 10.0, 15.0, 20.0}) {
    const auto r = construct_pluralityveto_lb(m, beta);
    const double lnm = std::log(400.0);
    CHECK(r.params.at("k") == std::floor(399 / (beta * lnm)));
    CHECK(r.params.at("util_B") == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.flags.at("top_B_le_5_over_4m"));
    CHECK(r.flags.at("B_loses_population_veto"));
    CHECK(r.population_distortion >= r.lower_bound);
  }
}

TEST_CASE("copeland construction") {
  for (double beta : {30.0, 100.0, 300.0}) {
    const auto r = construct_copeland_lb(beta, 0.1);
    CHECK(r.flags.at("margin_WY_above_half"));
    CHECK(r.flags.at("margin_YB_above_half"));
    CHECK(r.flags.at("margin_BW_above_half"));
    CHECK(r.flags.at("W_population_copeland_winner"));
    CHECK(r.population_distortion == doctest::Approx(r.closed_form_distortion).epsilon(1e-9));
    // The two binding margins sit at 1/2 + 1/beta.
    CHECK(r.params.at("p_WY") == doctest::Approx(0.5 + 1 / beta).epsilon(1e-9));
    CHECK(r.params.at("p_YB") == doctest::Approx(0.5 + 1 / beta).epsilon(1e-9));
  }
  // beta -> infinity limits.
  const auto r = construct_copeland_lb(1e5, 0.1);
  CHECK(r.params.at("p") == doctest::Approx(r.params.at("p_limit")).epsilon(1e-3));
  CHECK(r.closed_form_distortion / 1e5 == doctest::Approx(r.params.at("ratio_limit")).epsilon(1e-3));
}

TEST_CASE("tournament construction") {
  const double rho = 0.05, eps = 0.1;
  for (double gamma : {0.01, 0.02, 0.03}) {
    const auto t = tournament_params(gamma, eps);
    const double g2 = gamma * gamma;
    CHECK(t.p == doctest::Approx((6 * gamma + 4 * g2) / (1 + 6 * gamma)));
    CHECK(std::log(t.s / (1 - t.s)) == doctest::Approx(t.delta));
    const auto r = construct_tournament_lb(rho, eps, gamma, std::nullopt);
    CHECK(r.all_flags());
    CHECK(tournament_error_term(r.params.at("beta0"), t.eta, t.delta) < gamma / 4);
    CHECK(r.population_distortion == doctest::Approx(r.closed_form_distortion).epsilon(1e-9));
    // Coefficient approaches (5 - 3 eta)/8 linearly in gamma.
    const double gap = std::abs(r.params.at("welfare_coefficient") - r.params.at("coefficient_limit"));
    CHECK(gap <= 2.0 * gamma);
  }
}

TEST_CASE("cyclic relabelings") {
  const auto r = construct_tournament_lb(0.05, 0.1, 0.01, std::nullopt);
  const auto rel = cyclic_relabelings(r);
  CHECK(to_json(rel[0]) == to_json(r.instance));
  // W moves to a different index in every relabeling.
  int at_zero = 0;
  for (const auto& inst : rel) {
    const auto u = inst.util();
    const auto base = r.instance.util();
    at_zero += std::abs(u[0] - base[2]) < 1e-15;
  }
  CHECK(at_zero == 1);
  const auto base_util = r.instance.util();
  const double best = *std::max_element(base_util.begin(), base_util.end());
  for (const auto& inst : rel) {
    const auto util = inst.util();
    CHECK(*std::max_element(util.begin(), util.end()) == doctest::Approx(best));
  }
  CHECK_THROWS_AS(cyclic_relabelings(construct_rd_lb(5, 2.0, 0.1)), PreconditionError);
}

TEST_CASE("construction JSON") {
  const auto r = construct_copeland_lb(30.0, 0.1);
  const auto j = to_json(r);
  CHECK(j.at("family") == "copeland");
  CHECK(j.at("predicted_winner") == 2);
  CHECK(j.at("validity_flags").at("W_population_copeland_winner") == true);
  CHECK(j.at("internal_params").contains("p"));
  CHECK(to_json(instance_from_json(j.at("instance"))) == j.at("instance"));
}
