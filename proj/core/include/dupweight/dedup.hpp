#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dupweight/document.hpp"
#include "dupweight/minhash.hpp"

namespace dupweight {

enum class KeepPolicy {
  kFirstId,  // lexicographically smallest doc_id
  kLongest,  // most tokens, smallest doc_id on ties
};

KeepPolicy parse_keep_policy(const std::string& name);
std::string keep_policy_name(KeepPolicy policy);

struct DedupDecision {
  std::string doc_id;
  uint64_t cluster_id = 0;  // dense, ordered by each cluster's smallest doc_id
  bool keep = false;
};

struct DedupParams {
  MinHashParams minhash;
  LshParams lsh;
  KeepPolicy policy = KeepPolicy::kFirstId;
};

// Connected components of the LSH candidate-pair relation; exactly one kept
// document per cluster, singletons keep themselves. Decisions are sorted by
// doc_id and independent of worker count.
std::vector<DedupDecision> hard_dedup(std::span<const TokenizedDocument> docs,
                                      const DedupParams& params, int workers);

// Clusters as connected components over explicit pairs (indices into a
// corpus of `n` documents); returns for each index its component
// representative index. Exposed for direct property testing.
std::vector<size_t> cluster_components(size_t n,
                                       std::span<const std::pair<uint32_t, uint32_t>> pairs);

void write_dedup(const std::string& path, std::span<const DedupDecision> decisions,
                 const DedupParams& params, const std::string& config_digest);

struct DedupFile {
  std::string config_digest;
  std::vector<DedupDecision> decisions;
};

DedupFile read_dedup(const std::string& path);

}  // namespace dupweight
