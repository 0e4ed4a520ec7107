#include <benchmark/benchmark.h>

#include "dsage/advisory.hpp"
#include "dsage/inference.hpp"
#include "dsage/seed.hpp"
#include "generators.hpp"
#include "scenarios.hpp"

namespace {

using namespace dsage;

void BM_RunSeedWorkedExample(benchmark::State& state) {
  const auto& kb = seed_kb();
  const auto wm = testing::wm_of(testing::worked_example_observations());
  for (auto _ : state) benchmark::DoNotOptimize(run(kb, wm));
}
BENCHMARK(BM_RunSeedWorkedExample);

void BM_RunSeedAllObserved(benchmark::State& state) {
  const auto& kb = seed_kb();
  WorkingMemory wm;
  for (const auto& ind : kb.catalog) {
    for (const auto& st : ind.legal_states) wm.put({{ind.name, st.verb, st.value}, CertaintyFactor(0.8), ObservationSource::user});
  }
  for (auto _ : state) {
    auto result = run(kb, wm);
    benchmark::DoNotOptimize(make_advisories(kb, result));
  }
}
BENCHMARK(BM_RunSeedAllObserved);

void BM_RunGenerated(benchmark::State& state) {
  testing::Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto kb = testing::random_kb(rng, {.min_indicators = 20, .max_indicators = 20, .min_rules = n, .max_rules = n});
  const auto wm = testing::random_wm(rng, kb, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(run(kb, wm));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunGenerated)->Arg(12)->Arg(50);

}  // namespace
