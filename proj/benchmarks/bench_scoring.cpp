#include <benchmark/benchmark.h>

#include "bench_support.hpp"
#include "dupweight/commonness.hpp"
#include "dupweight/ngram_counts.hpp"
#include "dupweight/ngram_model.hpp"
#include "dupweight/tokenizer.hpp"

namespace {

void BM_ScoreDocuments(benchmark::State& state) {
  const uint32_t vocab_size = 20000;
  const dupweight::Vocabulary vocab =
      dupweight::Vocabulary::freeze_passthrough(vocab_size);
  const auto train = bench::synthetic_corpus(2000, 256, vocab_size, 7);
  const dupweight::CountTable counts = dupweight::count_documents(
      train, 4, vocab.bos_id(), vocab.eos_id(), 1);
  const dupweight::NgramModel model =
      dupweight::NgramModel::estimate(counts, vocab);

  const auto docs = bench::synthetic_corpus(500, 256, vocab_size, 13);
  uint64_t tokens = 0;
  for (const auto& d : docs) tokens += d.tokens.size();
  for (auto _ : state) {
    auto records = dupweight::score_documents(model, docs, 1);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(tokens) * state.iterations());
}

BENCHMARK(BM_ScoreDocuments)->Unit(benchmark::kMillisecond);

}  // namespace
