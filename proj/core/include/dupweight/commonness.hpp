#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dupweight/document.hpp"
#include "dupweight/ngram_model.hpp"

namespace dupweight {

// Per-document data commonness: the geometric mean of the conditional
// probabilities of every scored position (each document token plus <eos>,
// conditioned on its <bos>-padded left context).
struct CommonnessRecord {
  std::string doc_id;
  double commonness = 0.0;      // exp(log_commonness), in (0, 1]
  double log_commonness = 0.0;  // mean per-position natural-log probability
  uint64_t n_tokens = 0;        // scored positions: |tokens| + 1 for <eos>
};

CommonnessRecord score_document(const NgramModel& model, std::string doc_id,
                                std::span<const TokenId> tokens);

// One record per document, in input order; independent of `workers`.
std::vector<CommonnessRecord> score_documents(const NgramModel& model,
                                              std::span<const TokenizedDocument> docs,
                                              int workers);

void sort_by_doc_id(std::vector<CommonnessRecord>& records);

// JSONL artifact: a header record carrying the config digest, then one
// record per line (caller supplies them already sorted by doc_id).
void write_commonness(const std::string& path,
                      std::span<const CommonnessRecord> records,
                      const std::string& config_digest);

struct CommonnessFile {
  std::string config_digest;
  std::vector<CommonnessRecord> records;
};

CommonnessFile read_commonness(const std::string& path);

}  // namespace dupweight
