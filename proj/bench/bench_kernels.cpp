// Serial reference vs OpenMP paths for the kernels that have both, plus the
// (inherently sequential) merge sweep for scale.

#include <filesystem>

#include <benchmark/benchmark.h>

#include "pcount/calibration.hpp"
#include "pcount/counting.hpp"
#include "pcount/filtration.hpp"
#include "pcount/grid.hpp"
#include "pcount/phantom.hpp"
#include "pcount/volume_io.hpp"

using namespace pcount;

namespace {

const Volume& working_volume() {
  static const Volume v = [] {
    oracle::PhantomSpec spec;
    spec.dims = {40, 80, 40};
    spec.n_lesions = 20;
    spec.noise_speckles = 40;
    spec.background = 0.02;
    spec.seed = 1;
    return oracle::generate_phantom(spec).volume;
  }();
  return v;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_FiltrationOrder(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_filtration_order(working_volume(), 0.0, exec_of(state)));
}
BENCHMARK(BM_FiltrationOrder)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SweepDirect(benchmark::State& state) {
  const auto grid = default_direct_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_direct(working_volume(), grid, exec_of(state)));
}
BENCHMARK(BM_SweepDirect)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Downsample(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(downsample(working_volume(), 2, exec_of(state)));
}
BENCHMARK(BM_Downsample)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CountTable(benchmark::State& state) {
  static const auto dir = [] {
    const auto d = std::filesystem::temp_directory_path() / "pcount-bench-table";
    oracle::LongitudinalSpec spec;
    spec.n_subjects = 4;
    spec.timepoints = 4;
    spec.phantom.dims = {40, 80, 40};
    spec.phantom.noise_speckles = 40;
    spec.phantom.background = 0.02;
    oracle::generate_longitudinal(spec, d);
    return d;
  }();
  const LongitudinalManifest m = load_manifest(dir / "manifest.json");
  CountOptions opt;
  opt.exec = exec_of(state);
  const auto grid = default_persistence_grid();
  for (auto _ : state) benchmark::DoNotOptimize(build_count_table(m, grid, opt));
}
BENCHMARK(BM_CountTable)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PCountMerge(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pcount_merge(working_volume(), 0.02, 0.0, Exec::serial));
}
BENCHMARK(BM_PCountMerge)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
