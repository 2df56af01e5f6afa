// Serial reference vs OpenMP ensemble throughput on the driven qubit.

#include <benchmark/benchmark.h>

#include "qsde/ensemble.hpp"

namespace {

using namespace qsde;

void run(benchmark::State& state, Unravelling kind, bool parallel) {
  const auto model = constant_model({qubit::sigma_minus()}, 0.5 * qubit::sigma_z() + qubit::sigma_x());
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  EnsembleOptions opts;
  opts.n_traj = static_cast<std::size_t>(state.range(0));
  opts.base_seed = 1;
  opts.parallel = parallel;
  for (auto _ : state) {
    auto s = unravelling_ensemble(kind, model, qubit::plus(), grid, {{"sz", qubit::sigma_z()}}, opts);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BelavkinSerial(benchmark::State& s) { run(s, Unravelling::Belavkin, false); }
void BelavkinParallel(benchmark::State& s) { run(s, Unravelling::Belavkin, true); }
void GisinSerial(benchmark::State& s) { run(s, Unravelling::Gisin, false); }
void GisinParallel(benchmark::State& s) { run(s, Unravelling::Gisin, true); }

}  // namespace

BENCHMARK(BelavkinSerial)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BelavkinParallel)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(GisinSerial)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(GisinParallel)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
