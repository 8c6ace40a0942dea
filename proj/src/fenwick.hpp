#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "plvote/rng.hpp"

namespace plvote::detail {

// Weighted draw-without-replacement over m slots using a Fenwick tree of
// strengths. `tree` has m+1 entries; slot weights are kept alongside so a
// removed slot can be recognised.
class FenwickDraw {
 public:
  FenwickDraw(std::span<double> tree, std::span<double> weights)
      : tree_(tree), weights_(weights), m_(weights.size()) {}

  // Builds the tree in O(m) from the current weights.
  void build() {
    tree_[0] = 0.0;
    for (std::size_t i = 1; i <= m_; ++i) tree_[i] = weights_[i - 1];
    for (std::size_t i = 1; i <= m_; ++i) {
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= m_) tree_[parent] += tree_[i];
    }
    total_ = 0.0;
    for (std::size_t i = m_; i > 0; i -= i & (~i + 1)) total_ += tree_[i];
  }

  double total() const { return total_; }

  // Slot whose cumulative range contains u * total.
  std::size_t pick(double u) const {
    double rem = u * total_;
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 <= m_) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step <= m_ && tree_[pos + step] <= rem) {
        pos += step;
        rem -= tree_[pos];
      }
    }
    if (pos >= m_ || weights_[pos] <= 0.0) pos = nearest_live(pos);
    return pos;
  }

  void remove(std::size_t slot) {
    const double w = weights_[slot];
    weights_[slot] = 0.0;
    for (std::size_t i = slot + 1; i <= m_; i += i & (~i + 1)) tree_[i] -= w;
    total_ = 0.0;
    for (std::size_t i = m_; i > 0; i -= i & (~i + 1)) total_ += tree_[i];
  }

 private:
  // Rounding can leave the descent on an exhausted slot at the end of the
  // range; fall back to the closest slot that still carries weight.
  std::size_t nearest_live(std::size_t pos) const {
    if (pos >= m_) pos = m_ - 1;
    for (std::size_t d = 0; d < m_; ++d) {
      if (pos >= d && weights_[pos - d] > 0.0) return pos - d;
      if (pos + d < m_ && weights_[pos + d] > 0.0) return pos + d;
    }
    return pos;
  }

  std::span<double> tree_;
  std::span<double> weights_;
  std::size_t m_;
  double total_ = 0.0;
};

}  // namespace plvote::detail
