#include <benchmark/benchmark.h>

#include "stigmergy/domains.hpp"
#include "stigmergy/grad_oracle.hpp"
#include "stigmergy/harness.hpp"
#include "stigmergy/toys.hpp"

using namespace stigmergy;

namespace {

// One run of N trials; items = trials.
void BM_Trials(benchmark::State& state, Algorithm algorithm, const char* domain) {
  ExperimentConfig cfg;
  cfg.domain = domain;
  cfg.algorithm = algorithm;
  cfg.runs = 1;
  cfg.trials = static_cast<std::size_t>(state.range(0));
  std::size_t steps = 0;
  for (auto _ : state) {
    const auto results = run_experiment(cfg);
    for (const auto& r : results) steps += r.steps;
    benchmark::DoNotOptimize(results.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["steps/s"] = benchmark::Counter(double(steps), benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_Trials, vaps_lu5, Algorithm::Vaps, "load-unload-5")->Arg(1000);
BENCHMARK_CAPTURE(BM_Trials, sarsa_lu5, Algorithm::Sarsa, "load-unload-5")->Arg(1000);
BENCHMARK_CAPTURE(BM_Trials, vaps_two_loaders, Algorithm::Vaps, "load-unload-two-loaders")->Arg(1000);

void BM_OptimalLength(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const LoadUnloadSpec spec{n, {n - 1}, {}, 0};
  const MemoryConfig mem{1, MemoryMode::Augment, MemoryActionStyle::SetClear, true};
  for (auto _ : state) benchmark::DoNotOptimize(optimal_trial_length(spec, mem));
}
BENCHMARK(BM_OptimalLength)->Arg(5)->Arg(15)->Arg(30);

void BM_Enumerate(benchmark::State& state) {
  const Toy toy = make_toy("load-unload-3");
  const EnumerationSpec spec{toy.model, static_cast<std::size_t>(state.range(0))};
  Rng rng(1);
  const QTable q = random_qtable(toy.model->observation_count(), toy.model->action_count(), rng, 1.0);
  std::size_t atoms = 0;
  for (auto _ : state) {
    const auto out = enumerate(spec, q, 0.7);
    atoms = out.size();
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["atoms"] = double(atoms);
}
BENCHMARK(BM_Enumerate)->Arg(4)->Arg(6)->Arg(8);

void BM_ExactGrad(benchmark::State& state) {
  const Toy toy = make_toy("load-unload-3");
  GradientOracle oracle({toy.model, 6});
  Rng rng(2);
  const QTable q = random_qtable(toy.model->observation_count(), toy.model->action_count(), rng, 1.0);
  const auto atoms = oracle.enumerate(q, 0.7);
  const ErrorMeasure m = ErrorMeasure::combined(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(oracle.exact_grad_B(atoms, m, q, 0.7));
}
BENCHMARK(BM_ExactGrad);

}  // namespace

BENCHMARK_MAIN();
