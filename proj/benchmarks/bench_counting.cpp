#include <benchmark/benchmark.h>

#include "bench_support.hpp"
#include "dupweight/ngram_counts.hpp"

namespace {

void BM_CountDocuments(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const uint32_t vocab = 50000;
  const auto docs = bench::synthetic_corpus(2000, 256, vocab, 7);
  uint64_t tokens = 0;
  for (const auto& d : docs) tokens += d.tokens.size();
  for (auto _ : state) {
    dupweight::CountTable counts =
        dupweight::count_documents(docs, order, vocab + 1, vocab + 2, 1);
    benchmark::DoNotOptimize(counts.total_windows());
  }
  state.SetItemsProcessed(static_cast<int64_t>(tokens) * state.iterations());
}

BENCHMARK(BM_CountDocuments)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
