#include "plvote/population.hpp"

#include <cmath>

#include "plvote/common.hpp"
#include "plvote/pl_model.hpp"
#include "plvote/sigmoid.hpp"

namespace plvote {

namespace {

void add_fixed_type(PopulationStats& ps, const VoterType& t, double beta) {
  const int m = ps.m;
  const double f = t.fraction;
  for (int j = 0; j < m; ++j)
    for (int jp = 0; jp < m; ++jp)
      if (j != jp)
        ps.pairwise[static_cast<std::size_t>(j) * m + jp] +=
            f * sigma(beta, t.utilities[j] - t.utilities[jp]);
  const auto top = top_probabilities(t.utilities, beta);
  for (int j = 0; j < m; ++j) ps.top[j] += f * top[j];
  if (!ps.bottom.empty()) {
    const auto bot = bottom_prob_exact(t.utilities, beta);
    for (int j = 0; j < m; ++j) ps.bottom[j] += f * bot[j];
  }
}

void add_family(PopulationStats& ps, const SymmetricSubsetFamily& fam, double beta) {
  const int m = ps.m;
  const double f = fam.fraction;
  const int others = m - 1;
  const int k = fam.k;
  const int B = fam.special;

  // Top: closed form for the special candidate, remainder split evenly.
  const double wb = std::exp(beta * fam.base);
  const double wh = std::exp(beta * fam.high);
  const double wl = std::exp(beta * fam.low);
  const double top_b = wb / (wb + k * wh + (others - k) * wl);
  for (int j = 0; j < m; ++j) ps.top[j] += f * (j == B ? top_b : (1.0 - top_b) / others);

  if (!ps.bottom.empty()) {
    std::vector<double> rep(static_cast<std::size_t>(m), fam.low);
    rep[0] = fam.base;
    for (int i = 1; i <= k; ++i) rep[i] = fam.high;
    const double bot_b = bottom_prob_exact(rep, beta)[0];
    for (int j = 0; j < m; ++j) ps.bottom[j] += f * (j == B ? bot_b : (1.0 - bot_b) / others);
  }

  const double in = static_cast<double>(k) / others;
  const double b_over = in * sigma(beta, fam.base - fam.high) + (1.0 - in) * sigma(beta, fam.base - fam.low);
  const double b_under = in * sigma(beta, fam.high - fam.base) + (1.0 - in) * sigma(beta, fam.low - fam.base);
  double both_same = 1.0, split = 0.0;
  if (others >= 2) {
    const double denom = static_cast<double>(others) * (others - 1);
    const double both_in = static_cast<double>(k) * (k - 1) / denom;
    const double both_out = static_cast<double>(others - k) * (others - k - 1) / denom;
    split = static_cast<double>(k) * (others - k) / denom;  // j in, j' out (and mirror)
    both_same = both_in + both_out;
  }
  const double hl = sigma(beta, fam.high - fam.low);
  const double lh = sigma(beta, fam.low - fam.high);
  const double pair_other = 0.5 * both_same + split * hl + split * lh;

  for (int j = 0; j < m; ++j) {
    for (int jp = 0; jp < m; ++jp) {
      if (j == jp) continue;
      double v;
      if (j == B) v = b_over;
      else if (jp == B) v = b_under;
      else v = pair_other;
      ps.pairwise[static_cast<std::size_t>(j) * m + jp] += f * v;
    }
  }
}

}  // namespace

PopulationStats population_stats(const Instance& inst) {
  inst.validate();
  PopulationStats ps;
  ps.m = inst.m;
  const auto m = static_cast<std::size_t>(inst.m);
  ps.pairwise.assign(m * m, 0.0);
  ps.top.assign(m, 0.0);
  ps.bottom.assign(m, 0.0);
  ps.util = inst.util();

  try {
    for (const auto& t : inst.types) add_fixed_type(ps, t, inst.beta);
    for (const auto& fam : inst.families) add_family(ps, fam, inst.beta);
  } catch (const ExactPathUnavailable&) {
    // Bottom probabilities are dropped; pairwise and top remain exact.
    ps.pairwise.assign(m * m, 0.0);
    ps.top.assign(m, 0.0);
    ps.bottom.clear();
    for (const auto& t : inst.types) add_fixed_type(ps, t, inst.beta);
    for (const auto& fam : inst.families) add_family(ps, fam, inst.beta);
  }
  return ps;
}

}  // namespace plvote
