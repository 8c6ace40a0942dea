#pragma once

#include <span>
#include <vector>

#include "plvote/instance.hpp"
#include "plvote/rng.hpp"

namespace plvote {

/// Plackett-Luce draw by sequential selection: each remaining candidate is
/// picked with probability proportional to exp(beta * u).
Ranking sample_ranking_sequential(std::span<const double> utilities, double beta,
                                  Stream& rng);

/// Plackett-Luce draw via the random-utility form: add i.i.d. Gumbel noise of
/// scale 1/beta and sort descending.
Ranking sample_ranking_gumbel(std::span<const double> utilities, double beta,
                              Stream& rng);

/// Top-choice probabilities exp(beta*u_j) / sum_k exp(beta*u_k).
std::vector<double> top_probabilities(std::span<const double> utilities, double beta);

/// Exact last-place probabilities.
///
/// Candidates with equal utility are exchangeable, so the chain only has to
/// track how many members of each utility level are still unranked. The state
/// space is the product of (level size + 1), which is 2^m when all utilities
/// differ and linear in m for the two-level vectors used by the lower-bound
/// constructions. Throws ExactPathUnavailable above 2^20 states.
std::vector<double> bottom_prob_exact(std::span<const double> utilities, double beta);

/// Closed form for one candidate of utility `u_low` against m-1 others sharing
/// `u_other`: prod_{k=1}^{m-1} (m-k)e^{beta(u_other-u_low)} /
/// ((m-k)e^{beta(u_other-u_low)} + 1).
double bottom_prob_equal_others(int m, double u_low, double u_other, double beta);

inline constexpr long long kMaxExactBottomStates = 1LL << 20;

}  // namespace plvote
