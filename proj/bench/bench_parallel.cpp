// Serial reference vs OpenMP path for the three parallel loops.

#include <benchmark/benchmark.h>

#include "bergman/kernel.hpp"

using namespace bergman;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_F_many(benchmark::State& st) {
  const WeightProfile wp{make_model_domain(1.2, 0.9), 2};
  std::vector<Complex> xs;
  for (int a = 0; a < 40; ++a)
    for (int b = 0; b < 20; ++b) xs.emplace_back(-20.0 + a, -0.5 * b);
  for (auto _ : st) benchmark::DoNotOptimize(F_many(wp, xs, {}, exec_of(st)));
}

void BM_build_atlas(benchmark::State& st) {
  const ModelDomain md = make_model_domain(1.0, kPi / 2);
  for (auto _ : st) benchmark::DoNotOptimize(build_atlas(md, 12.0, 6, {}, exec_of(st)));
}

void BM_kernel_series(benchmark::State& st) {
  const ModelDomain md = make_model_domain(1.2, 0.9);
  SeriesConfig cfg;
  cfg.exec = exec_of(st);
  const HartogsPoint t{0.3, Complex(0.1, md.v0)}, tau{Complex(0.2, 0.1), Complex(-0.2, md.v0)};
  for (auto _ : st) benchmark::DoNotOptimize(kernel_series_Dprime(t, tau, md, cfg));
}

}  // namespace

BENCHMARK(BM_F_many)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_atlas)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kernel_series)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
