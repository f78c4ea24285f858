#include <benchmark/benchmark.h>

#include "bench_support.hpp"
#include "dupweight/minhash.hpp"

namespace {

void BM_MinHashCorpus(benchmark::State& state) {
  const auto docs = bench::synthetic_corpus(1000, 256, 50000, 7);
  uint64_t tokens = 0;
  for (const auto& d : docs) tokens += d.tokens.size();
  dupweight::MinHashParams params;
  params.num_hashes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto signatures = dupweight::minhash_corpus(docs, params, 1);
    benchmark::DoNotOptimize(signatures.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(tokens) * state.iterations());
}

BENCHMARK(BM_MinHashCorpus)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_LshCandidatePairs(benchmark::State& state) {
  const auto docs = bench::synthetic_corpus(2000, 256, 500, 7);
  dupweight::MinHashParams params;
  const auto signatures = dupweight::minhash_corpus(docs, params, 1);
  for (auto _ : state) {
    auto pairs = dupweight::lsh_candidate_pairs(signatures, {});
    benchmark::DoNotOptimize(pairs.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(docs.size()) *
                          state.iterations());
}

BENCHMARK(BM_LshCandidatePairs)->Unit(benchmark::kMillisecond);

}  // namespace
