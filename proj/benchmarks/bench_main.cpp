#include <benchmark/benchmark.h>

#include <vector>

#include "klsc/constraints/induced.hpp"
#include "klsc/constraints/score_sample.hpp"
#include "klsc/diagnostics/divergence.hpp"
#include "klsc/diffusion/energy_dps.hpp"
#include "klsc/diffusion/schedule.hpp"

using namespace klsc;

namespace {

const IsotropicGmm kPrior = IsotropicGmm::four_mode();

void BM_GmmLogPdf(benchmark::State& state) {
  Point x{0.3, -1.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kPrior.log_pdf(x));
    x.x += 1e-9;
  }
}
BENCHMARK(BM_GmmLogPdf);

void BM_OracleScoreJacobian(benchmark::State& state) {
  const auto sched = build_linear_schedule(1000);
  const auto noised = noised_gmm_at(kPrior, sched, 500);
  Point x{0.3, -1.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_score_jacobian(noised, x));
    x.y += 1e-9;
  }
}
BENCHMARK(BM_OracleScoreJacobian);

void BM_GuidedReverseStep(benchmark::State& state) {
  const auto sched = build_linear_schedule(1000);
  const auto noised = noised_gmm_at(kPrior, sched, 500);
  GuidanceConfig g;
  g.zeta = make_zeta(sched, ZetaSchedule::ddpm_beta, 1.0);
  g.strength = 1.0;
  const auto score = ScoreField::angular();
  ReverseState st;
  st.step = 500;
  st.x = {0.3, -1.2};
  for (auto _ : state) benchmark::DoNotOptimize(reverse_step(st, sched, noised, g, score, Point{0.1, 0.2}));
}
BENCHMARK(BM_GuidedReverseStep);

void BM_KdeToGrid(benchmark::State& state) {
  Rng rng(1);
  const auto pts = kPrior.sample(static_cast<std::size_t>(state.range(0)), rng);
  const Grid2D grid{};
  for (auto _ : state) benchmark::DoNotOptimize(kde_to_grid(pts, {}, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdeToGrid)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GridKl(benchmark::State& state) {
  const Grid2D grid{};
  const auto p = prior_on_grid(kPrior, grid);
  const auto s = evaluate_on_grid(grid, [score = ScoreField::angular()](Point x) { return score(x); });
  const auto q = tilt_on_grid(p, s, 0.28);
  for (auto _ : state) benchmark::DoNotOptimize(grid_kl(q, p));
}
BENCHMARK(BM_GridKl)->Unit(benchmark::kMillisecond);

void BM_TiltMoments(benchmark::State& state) {
  Rng rng(2);
  const auto pool = ScoreSample::draw(kPrior, ScoreField::angular(), 100'000, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pool.tilt_moments(0.5));
}
BENCHMARK(BM_TiltMoments)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
