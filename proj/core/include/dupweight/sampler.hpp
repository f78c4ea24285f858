#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dupweight/commonness.hpp"
#include "dupweight/reweighter.hpp"

namespace dupweight {

struct ManifestEntry {
  uint64_t draw_index = 0;  // 0-based position in the draw stream
  std::string doc_id;
  int segment = 0;  // 1-based
};

struct SamplingManifest {
  uint64_t seed = 0;
  uint64_t token_budget = 0;
  uint64_t achieved_tokens = 0;  // in [budget, budget + max doc length)
  std::string plan_digest;
  std::vector<uint64_t> per_segment_draws;  // size K
  std::vector<ManifestEntry> entries;
};

// Each draw picks segment k with probability W_k, then a document uniformly
// from that segment without replacement; an exhausted segment reshuffles
// into a new epoch. Stops at the first draw that reaches the budget
// (counted in the token counts recorded in the commonness records). The
// random stream is a single SplitMix64 sequence, so (seed, plan, records)
// replays byte-identically on any platform.
SamplingManifest sample(const SegmentPlan& plan,
                        std::span<const CommonnessRecord> records,
                        uint64_t token_budget, uint64_t seed,
                        std::string plan_digest = "");

void write_manifest(const std::string& path, const SamplingManifest& manifest,
                    const std::string& config_digest);

struct ManifestFile {
  std::string config_digest;
  SamplingManifest manifest;
};

ManifestFile read_manifest(const std::string& path);

enum class ExportFormat { kIdList, kText };

ExportFormat parse_export_format(const std::string& name);

// id-list: one doc_id per line in draw order. text: the documents' text in
// draw order, materialized from the corpus files.
void export_manifest(const SamplingManifest& manifest,
                     const std::vector<std::string>& corpus_paths,
                     ExportFormat format, const std::string& out_path);

}  // namespace dupweight
