#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "plvote/common.hpp"
#include "plvote/instance.hpp"
#include "plvote/rng.hpp"

namespace plvote {

/// n full rankings, stored row-major (voter i occupies [i*m, (i+1)*m)).
struct Profile {
  int m = 0;
  std::size_t n = 0;
  std::vector<std::uint16_t> orders;

  std::span<const std::uint16_t> ranking(std::size_t voter) const {
    return {orders.data() + voter * static_cast<std::size_t>(m), static_cast<std::size_t>(m)};
  }
};

/// Sufficient statistics of a profile. Counts are exact; the fractions s, t, b
/// are counts divided by n.
struct TallyStats {
  int m = 0;
  std::size_t n = 0;
  bool has_pairwise = false;
  bool has_bottom = false;
  std::vector<std::uint64_t> pair_counts;  // m x m, voters ranking j above j'
  std::vector<std::uint64_t> top_counts;
  std::vector<std::uint64_t> bottom_counts;
  std::shared_ptr<const Profile> profile;  // set when built from stored rankings

  double s(int j, int jp) const {
    return static_cast<double>(pair_counts[static_cast<std::size_t>(j) * m + jp]) /
           static_cast<double>(n);
  }
  double t(int j) const { return static_cast<double>(top_counts[j]) / static_cast<double>(n); }
  double b(int j) const {
    return static_cast<double>(bottom_counts[j]) / static_cast<double>(n);
  }
  std::uint64_t pair_count(int j, int jp) const {
    return pair_counts[static_cast<std::size_t>(j) * m + jp];
  }
};

/// Which statistics a streaming tally must produce. Top-only tallies stop each
/// voter's draw after the first pick.
struct TallyNeeds {
  bool pairwise = true;
  bool bottom = true;
};

/// Per-thread working memory for VoterSampler.
struct DrawScratch {
  std::vector<double> weights;
  std::vector<double> tree;
  std::vector<int> index;
  std::vector<char> placed;
};

/// Sampler that turns a compiled Instance into per-voter draws. Voter i of
/// trial `trial` uses the stream derive_key(seed, trial, i).
class VoterSampler {
 public:
  explicit VoterSampler(const Instance& inst);

  int m() const { return m_; }

  /// Full ranking into `out` (length m).
  void draw_ranking(Stream& rng, std::span<std::uint16_t> out, DrawScratch& scratch) const;

  /// Top choice only; identical to the first entry draw_ranking would produce
  /// from the same stream.
  int draw_top(Stream& rng, DrawScratch& scratch) const;

 private:
  struct Entry {
    bool family = false;
    std::vector<double> strengths;  // fixed-type strengths exp(beta*(u - umax))
    int special = 0;
    int k = 0;
    double w_base = 0, w_high = 0, w_low = 0;
  };

  int pick_entry(Stream& rng) const;
  void fill_strengths(const Entry& e, Stream& rng, DrawScratch& scratch) const;

  int m_;
  std::vector<Entry> entries_;
  std::vector<double> cumulative_;
};

/// Draws n voters i.i.d. from the instance and stores their rankings.
Profile sample_profile(const Instance& inst, std::size_t n, std::uint64_t seed,
                       std::uint64_t trial = 0, Exec exec = Exec::Parallel);

/// Counts the statistics of a stored profile; keeps a handle to it. Pairwise
/// counting is O(n m^2); skip it through `needs` when only tops are used.
TallyStats tally(std::shared_ptr<const Profile> profile, TallyNeeds needs = {},
                 Exec exec = Exec::Parallel);

/// Samples and tallies without storing rankings. Produces the same counts as
/// tally(sample_profile(...)) for the same (seed, trial).
TallyStats tally_sampled(const Instance& inst, std::size_t n, std::uint64_t seed,
                         std::uint64_t trial, TallyNeeds needs, Exec exec = Exec::Parallel);

}  // namespace plvote
