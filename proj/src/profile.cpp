#include "plvote/profile.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "fenwick.hpp"
#include "plvote/common.hpp"

namespace plvote {

VoterSampler::VoterSampler(const Instance& inst) : m_(inst.m) {
  inst.validate();
  double acc = 0.0;
  for (const auto& t : inst.types) {
    Entry e;
    const double top = *std::max_element(t.utilities.begin(), t.utilities.end());
    e.strengths.resize(t.utilities.size());
    for (std::size_t j = 0; j < t.utilities.size(); ++j)
      e.strengths[j] = std::exp(inst.beta * (t.utilities[j] - top));
    entries_.push_back(std::move(e));
    acc += t.fraction;
    cumulative_.push_back(acc);
  }
  for (const auto& f : inst.families) {
    Entry e;
    e.family = true;
    e.special = f.special;
    e.k = f.k;
    const double top = std::max({f.base, f.high, f.low});
    e.w_base = std::exp(inst.beta * (f.base - top));
    e.w_high = std::exp(inst.beta * (f.high - top));
    e.w_low = std::exp(inst.beta * (f.low - top));
    entries_.push_back(std::move(e));
    acc += f.fraction;
    cumulative_.push_back(acc);
  }
}

int VoterSampler::pick_entry(Stream& rng) const {
  if (entries_.size() == 1) return 0;
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<int>(it - cumulative_.begin());
  return std::min(idx, static_cast<int>(entries_.size()) - 1);
}

void VoterSampler::fill_strengths(const Entry& e, Stream& rng, DrawScratch& s) const {
  s.weights.resize(static_cast<std::size_t>(m_));
  s.tree.resize(static_cast<std::size_t>(m_) + 1);
  if (!e.family) {
    std::copy(e.strengths.begin(), e.strengths.end(), s.weights.begin());
    return;
  }
  // Uniform k-subset of the non-special candidates via partial Fisher-Yates.
  s.index.resize(static_cast<std::size_t>(m_ - 1));
  for (int j = 0, pos = 0; j < m_; ++j)
    if (j != e.special) s.index[pos++] = j;
  const int others = m_ - 1;
  std::fill(s.weights.begin(), s.weights.end(), e.w_low);
  s.weights[e.special] = e.w_base;
  for (int i = 0; i < e.k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(others - i)));
    std::swap(s.index[i], s.index[j]);
    s.weights[s.index[i]] = e.w_high;
  }
}

void VoterSampler::draw_ranking(Stream& rng, std::span<std::uint16_t> out, DrawScratch& s) const {
  fill_strengths(entries_[pick_entry(rng)], rng, s);
  detail::FenwickDraw draw(s.tree, s.weights);
  draw.build();
  s.placed.assign(static_cast<std::size_t>(m_), 0);
  for (int pos = 0; pos + 1 < m_; ++pos) {
    const std::size_t c = draw.pick(rng.uniform());
    out[pos] = static_cast<std::uint16_t>(c);
    s.placed[c] = 1;
    draw.remove(c);
  }
  for (int c = 0; c < m_; ++c)
    if (!s.placed[c]) out[m_ - 1] = static_cast<std::uint16_t>(c);
}

int VoterSampler::draw_top(Stream& rng, DrawScratch& s) const {
  fill_strengths(entries_[pick_entry(rng)], rng, s);
  detail::FenwickDraw draw(s.tree, s.weights);
  draw.build();
  return static_cast<int>(draw.pick(rng.uniform()));
}

Profile sample_profile(const Instance& inst, std::size_t n, std::uint64_t seed,
                       std::uint64_t trial, Exec exec) {
  require(n >= 1, "profile needs n >= 1 voters");
  const VoterSampler sampler(inst);
  Profile p;
  p.m = inst.m;
  p.n = n;
  p.orders.resize(n * static_cast<std::size_t>(inst.m));
  const auto m = static_cast<std::size_t>(inst.m);
  const auto count = static_cast<long long>(n);

#pragma omp parallel if (exec == Exec::Parallel)
  {
    DrawScratch scratch;
#pragma omp for schedule(static)
    for (long long i = 0; i < count; ++i) {
      Stream rng(derive_key(seed, trial, static_cast<std::uint64_t>(i)));
      sampler.draw_ranking(rng, {p.orders.data() + static_cast<std::size_t>(i) * m, m}, scratch);
    }
  }
  return p;
}

namespace {

struct Counts {
  std::vector<std::uint64_t> pair, top, bottom;

  Counts(int m, TallyNeeds needs)
      : pair(needs.pairwise ? static_cast<std::size_t>(m) * m : 0, 0),
        top(static_cast<std::size_t>(m), 0),
        bottom(needs.bottom ? static_cast<std::size_t>(m) : 0, 0) {}

  void add_ranking(std::span<const std::uint16_t> order, TallyNeeds needs) {
    const std::size_t m = order.size();
    ++top[order[0]];
    if (needs.bottom) ++bottom[order[m - 1]];
    if (needs.pairwise) {
      for (std::size_t a = 0; a + 1 < m; ++a) {
        std::uint64_t* row = pair.data() + static_cast<std::size_t>(order[a]) * m;
        for (std::size_t b = a + 1; b < m; ++b) ++row[order[b]];
      }
    }
  }

  void merge(const Counts& o) {
    for (std::size_t i = 0; i < pair.size(); ++i) pair[i] += o.pair[i];
    for (std::size_t i = 0; i < top.size(); ++i) top[i] += o.top[i];
    for (std::size_t i = 0; i < bottom.size(); ++i) bottom[i] += o.bottom[i];
  }
};

TallyStats to_stats(Counts&& c, int m, std::size_t n, TallyNeeds needs) {
  TallyStats t;
  t.m = m;
  t.n = n;
  t.has_pairwise = needs.pairwise;
  t.has_bottom = needs.bottom;
  t.pair_counts = std::move(c.pair);
  t.top_counts = std::move(c.top);
  t.bottom_counts = std::move(c.bottom);
  return t;
}

}  // namespace

TallyStats tally(std::shared_ptr<const Profile> profile, TallyNeeds needs, Exec exec) {
  require(profile != nullptr, "tally needs a profile");
  require(profile->n >= 1, "tally needs n >= 1 voters");
  const Profile& p = *profile;
  Counts total(p.m, needs);
  const auto count = static_cast<long long>(p.n);

#pragma omp parallel if (exec == Exec::Parallel)
  {
    Counts local(p.m, needs);
#pragma omp for schedule(static) nowait
    for (long long i = 0; i < count; ++i) local.add_ranking(p.ranking(static_cast<std::size_t>(i)), needs);
#pragma omp critical(plvote_tally_merge)
    total.merge(local);
  }
  TallyStats t = to_stats(std::move(total), p.m, p.n, needs);
  t.profile = std::move(profile);
  return t;
}

TallyStats tally_sampled(const Instance& inst, std::size_t n, std::uint64_t seed,
                         std::uint64_t trial, TallyNeeds needs, Exec exec) {
  require(n >= 1, "tally needs n >= 1 voters");
  const VoterSampler sampler(inst);
  const int m = inst.m;
  const bool full = needs.pairwise || needs.bottom;
  Counts total(m, needs);
  const auto count = static_cast<long long>(n);

#pragma omp parallel if (exec == Exec::Parallel)
  {
    Counts local(m, needs);
    DrawScratch scratch;
    std::vector<std::uint16_t> order(static_cast<std::size_t>(m));
#pragma omp for schedule(static) nowait
    for (long long i = 0; i < count; ++i) {
      Stream rng(derive_key(seed, trial, static_cast<std::uint64_t>(i)));
      if (full) {
        sampler.draw_ranking(rng, order, scratch);
        local.add_ranking(order, needs);
      } else {
        ++local.top[sampler.draw_top(rng, scratch)];
      }
    }
#pragma omp critical(plvote_tally_merge)
    total.merge(local);
  }
  return to_stats(std::move(total), m, n, needs);
}

}  // namespace plvote
