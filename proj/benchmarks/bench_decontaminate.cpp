#include <benchmark/benchmark.h>

#include "bench_support.hpp"
#include "dupweight/decontaminate.hpp"

namespace {

void BM_FindContaminated(benchmark::State& state) {
  auto train = bench::synthetic_corpus(2000, 256, 50000, 7);
  auto test = bench::synthetic_corpus(100, 256, 50000, 13);
  // Plant a few literal copies so the verification path runs too.
  for (size_t i = 0; i < 10; ++i) train[i * 97].tokens = test[i].tokens;
  uint64_t tokens = 0;
  for (const auto& d : train) tokens += d.tokens.size();
  for (auto _ : state) {
    auto findings = dupweight::find_contaminated(train, test, 50, 1);
    benchmark::DoNotOptimize(findings.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(tokens) * state.iterations());
}

BENCHMARK(BM_FindContaminated)->Unit(benchmark::kMillisecond);

}  // namespace
