#include "plvote/pl_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fenwick.hpp"
#include "plvote/common.hpp"

namespace plvote {

namespace {

void check_utilities(std::span<const double> u, double beta) {
  require(u.size() >= 2, "need at least two candidates");
  require(beta > 0.0, "beta must be positive");
  for (double x : u) require(x >= 0.0 && x <= 1.0, "utilities must lie in [0,1]");
}

std::vector<double> strengths(std::span<const double> u, double beta) {
  const double top = *std::max_element(u.begin(), u.end());
  std::vector<double> w(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) w[j] = std::exp(beta * (u[j] - top));
  return w;
}

}  // namespace

Ranking sample_ranking_sequential(std::span<const double> utilities, double beta, Stream& rng) {
  check_utilities(utilities, beta);
  const std::size_t m = utilities.size();
  std::vector<double> w = strengths(utilities, beta);
  std::vector<double> tree(m + 1);
  detail::FenwickDraw draw(tree, w);
  draw.build();
  std::vector<char> placed(m, 0);
  Ranking r;
  r.order.reserve(m);
  for (std::size_t pos = 0; pos + 1 < m; ++pos) {
    const std::size_t c = draw.pick(rng.uniform());
    r.order.push_back(static_cast<Candidate>(c));
    placed[c] = 1;
    draw.remove(c);
  }
  for (std::size_t c = 0; c < m; ++c)
    if (!placed[c]) r.order.push_back(static_cast<Candidate>(c));
  return r;
}

Ranking sample_ranking_gumbel(std::span<const double> utilities, double beta, Stream& rng) {
  check_utilities(utilities, beta);
  const std::size_t m = utilities.size();
  std::vector<double> key(m);
  for (std::size_t j = 0; j < m; ++j)
    key[j] = beta * utilities[j] - std::log(-std::log(rng.uniform_open()));
  Ranking r;
  r.order.resize(m);
  std::iota(r.order.begin(), r.order.end(), 0);
  std::sort(r.order.begin(), r.order.end(), [&](int a, int b) { return key[a] > key[b]; });
  return r;
}

std::vector<double> top_probabilities(std::span<const double> utilities, double beta) {
  std::vector<double> w = strengths(utilities, beta);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> bottom_prob_exact(std::span<const double> utilities, double beta) {
  check_utilities(utilities, beta);
  const std::size_t m = utilities.size();

  // Distinct utility levels and their multiplicities.
  std::vector<double> levels(utilities.begin(), utilities.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t g = levels.size();
  std::vector<int> count(g, 0);
  for (double u : utilities)
    ++count[std::lower_bound(levels.begin(), levels.end(), u) - levels.begin()];

  std::vector<long long> stride(g);
  long long states = 1;
  for (std::size_t i = 0; i < g; ++i) {
    stride[i] = states;
    states *= count[i] + 1;
    if (states > kMaxExactBottomStates) {
      throw ExactPathUnavailable("exact bottom probabilities unavailable for m=" +
                                 std::to_string(m) + " with " + std::to_string(g) +
                                 " distinct utilities");
    }
  }

  std::vector<double> w(g);
  for (std::size_t i = 0; i < g; ++i) w[i] = std::exp(beta * (levels[i] - levels.back()));

  // prob[state] = P(the unranked set has these per-level counts). Removing a
  // candidate strictly lowers the state index, so one descending pass suffices.
  std::vector<double> prob(static_cast<std::size_t>(states), 0.0);
  prob.back() = 1.0;
  std::vector<int> c(g);
  for (long long idx = states - 1; idx > 0; --idx) {
    const double here = prob[idx];
    if (here == 0.0) continue;
    long long rest = idx;
    int remaining = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      c[i] = static_cast<int>(rest % (count[i] + 1));
      rest /= count[i] + 1;
      remaining += c[i];
      total += c[i] * w[i];
    }
    if (remaining <= 1) continue;
    for (std::size_t i = 0; i < g; ++i) {
      if (c[i] == 0) continue;
      prob[idx - stride[i]] += here * (c[i] * w[i] / total);
    }
  }

  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = std::lower_bound(levels.begin(), levels.end(), utilities[j]) - levels.begin();
    out[j] = prob[stride[i]] / count[i];
  }
  return out;
}

double bottom_prob_equal_others(int m, double u_low, double u_other, double beta) {
  require(m >= 2, "need at least two candidates");
  const double e = std::exp(beta * (u_other - u_low));
  double p = 1.0;
  for (int k = 1; k <= m - 1; ++k) {
    const double a = (m - k) * e;
    p *= a / (a + 1.0);
  }
  return p;
}

}  // namespace plvote
