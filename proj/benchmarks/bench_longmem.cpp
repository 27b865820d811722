#include <benchmark/benchmark.h>

#include <vector>

#include "longmem/fracproc.hpp"
#include "longmem/memest.hpp"
#include "longmem/sisr.hpp"
#include "longmem/ssm.hpp"

using namespace longmem;

namespace {

ModelSpec bench_model(bool learn) {
  ModelSpec m;
  m.latent = FarimaSpec{{0.8}, 0.3, {}, 1.0};
  m.link = ObservationLink::kAbs;
  m.obs_noise_sd = 2.0;
  if (learn) m.learned = {LearnedParam{ParamKind::kAr, 0, -0.99, 0.99}};
  return m;
}

// Filters `range(1)` observations with `range(0)` particles.
void BM_FilterRun(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto T = static_cast<std::size_t>(state.range(1));
  const bool learn = state.range(2) != 0;
  const auto data = simulate_model(bench_model(false), T, 1);
  FilterOptions o;
  o.num_particles = n;
  o.seed = 2;
  o.kernel = config_from_delta(learn ? 0.98 : 1.0);
  for (auto _ : state) {
    auto r = run(bench_model(learn), data.obs, o);
    benchmark::DoNotOptimize(r.snapshots.back().state_mean);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * T));
}
BENCHMARK(BM_FilterRun)
    ->Args({500, 200, 0})
    ->Args({500, 200, 1})
    ->Args({2500, 200, 1})
    ->Unit(benchmark::kMillisecond);

void BM_ConditionalLaw(benchmark::State& state) {
  const FarimaSpec spec{{0.8}, 0.3, {}, 1.0};
  const auto path = simulate(spec, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(conditional_law(spec, path).mean);
}
BENCHMARK(BM_ConditionalLaw)->Arg(100)->Arg(1000)->Arg(5000);

void BM_ConditionalMean(benchmark::State& state) {
  const FarimaSpec spec{{0.8}, 0.3, {}, 1.0};
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto path = simulate(spec, n, 3);
  const auto c = ar_infinity_coeffs(spec, n).coeffs;
  for (auto _ : state) benchmark::DoNotOptimize(conditional_mean(c, path));
}
BENCHMARK(BM_ConditionalMean)->Arg(100)->Arg(1000)->Arg(5000);

void BM_Gph(benchmark::State& state) {
  const auto x = simulate(FarimaSpec{{}, 0.3, {}, 1.0}, static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(gph(x).d_hat);
}
BENCHMARK(BM_Gph)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_Simulate(benchmark::State& state) {
  const FarimaSpec spec{{0.8}, 0.3, {0.2}, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, 1000, 5, 2048).back());
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
