#pragma once

#include <vector>

#include "plvote/instance.hpp"

namespace plvote {

/// n -> infinity limits of the tally statistics for an Instance.
struct PopulationStats {
  int m = 0;
  std::vector<double> pairwise;  // row-major m x m, p_{j,j'} = P(j ranked above j')
  std::vector<double> top;
  std::vector<double> bottom;  // empty when the exact last-place path is unavailable
  std::vector<double> util;

  bool has_bottom() const { return !bottom.empty(); }
  double p(int j, int jp) const { return pairwise[static_cast<std::size_t>(j) * m + jp]; }
};

/// Exact mixture-weighted population quantities. Family entries use their
/// closed-form symmetric marginals; bottom probabilities come from
/// bottom_prob_exact.
PopulationStats population_stats(const Instance& inst);

}  // namespace plvote
