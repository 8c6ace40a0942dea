// Serial reference path against the OpenMP path for the three hot kernels.
// Each row also confirms the two paths produced identical results.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "plvote/constructions.hpp"
#include "plvote/distortion.hpp"
#include "plvote/profile.hpp"

using namespace plvote;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

template <class Run, class Same>
void compare(const char* name, Run run, Same same, int reps) {
  decltype(run(Exec::Serial)) serial, parallel;
  const double ts = seconds([&] { serial = run(Exec::Serial); }, reps);
  const double tp = seconds([&] { parallel = run(Exec::Parallel); }, reps);
  std::printf("%-34s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, ts / tp, same(serial, parallel) ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const double scale = argc > 1 ? std::atof(argv[1]) : 1.0;
  const int reps = 3;
  std::printf("threads: %d, scale: %g\n", omp_get_max_threads(), scale);
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial s", "parallel s", "speedup");

  const Instance pv = construct_pluralityveto_lb(400, 10.0).instance;
  const Instance cop = construct_copeland_lb(30.0, 0.1).instance;
  const auto n_big = static_cast<std::size_t>(1'000'000 * scale);

  compare(
      "tally_sampled top-only m=400",
      [&](Exec e) { return tally_sampled(pv, n_big / 4, 1, 0, {false, false}, e); },
      [](const TallyStats& a, const TallyStats& b) { return a.top_counts == b.top_counts; }, reps);

  compare(
      "tally_sampled pairwise m=3",
      [&](Exec e) { return tally_sampled(cop, n_big, 1, 0, {true, true}, e); },
      [](const TallyStats& a, const TallyStats& b) {
        return a.pair_counts == b.pair_counts && a.bottom_counts == b.bottom_counts;
      },
      reps);

  compare(
      "sample_profile m=400",
      [&](Exec e) { return sample_profile(pv, n_big / 20, 2, 0, e); },
      [](const Profile& a, const Profile& b) { return a.orders == b.orders; }, reps);

  compare(
      "upper_bound_sweep copeland",
      [&](Exec e) {
        SweepConfig cfg;
        cfg.samples = static_cast<std::size_t>(4000 * scale);
        cfg.seed = 3;
        cfg.exec = e;
        return upper_bound_sweep(Rule::Copeland, cfg);
      },
      [](const SweepReport& a, const SweepReport& b) {
        return a.max_ratio == b.max_ratio && a.evaluated == b.evaluated && a.violations == b.violations;
      },
      reps);
  return 0;
}
