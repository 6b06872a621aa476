#include <benchmark/benchmark.h>

#include <random>

#include "spcgt/bcj.hpp"
#include "spcgt/cohomology.hpp"

using namespace spcgt;

static void bm_enumerate(benchmark::State& state) {
  const unsigned g = static_cast<unsigned>(state.range(0));
  const std::uint64_t L = static_cast<std::uint64_t>(state.range(1));
  for (auto _ : state) {
    auto grp = enumerate(GeneratedGroup::symplectic(g, L));
    benchmark::DoNotOptimize(grp.cayley().order());
  }
}
BENCHMARK(bm_enumerate)->Args({1, 9})->Args({2, 2})->Args({2, 3})->Unit(benchmark::kMillisecond);

static void bm_echelon(benchmark::State& state) {
  const std::size_t width = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<ModVector> rows(width, ModVector(width));
  for (auto& r : rows)
    for (auto& v : r) v = static_cast<Residue>(rng() % 9);
  for (auto _ : state) {
    PrimePowerEchelon e(3, 2, width);
    for (const auto& r : rows) e.insert(r);
    benchmark::DoNotOptimize(e.kernel());
  }
}
BENCHMARK(bm_echelon)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void bm_h1(benchmark::State& state) {
  const auto grp = enumerate(GeneratedGroup::symplectic(2, static_cast<std::uint64_t>(state.range(0))));
  const auto m = adjoint_module(grp);
  for (auto _ : state) benchmark::DoNotOptimize(h1_cohomology(grp, m).h1);
}
BENCHMARK(bm_h1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void bm_bar_oracle(benchmark::State& state) {
  const auto grp = enumerate(GeneratedGroup::symplectic(1, 7));
  const auto m = standard_module(grp);
  for (auto _ : state) benchmark::DoNotOptimize(h1_bar_oracle(grp, m));
}
BENCHMARK(bm_bar_oracle)->Unit(benchmark::kMillisecond);

static void bm_filtration_rank(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dim_Bbar(static_cast<unsigned>(state.range(0)), 2));
}
BENCHMARK(bm_filtration_rank)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
