#include <benchmark/benchmark.h>

#include "dsage/dsl.hpp"
#include "dsage/seed.hpp"

namespace {

void BM_ParseSeed(benchmark::State& state) {
  const auto text = dsage::seed_kb_text();
  for (auto _ : state) benchmark::DoNotOptimize(dsage::dsl::parse_kb(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseSeed);

void BM_SerializeSeed(benchmark::State& state) {
  const auto& kb = dsage::seed_kb();
  for (auto _ : state) benchmark::DoNotOptimize(dsage::dsl::serialize_kb(kb));
}
BENCHMARK(BM_SerializeSeed);

}  // namespace
