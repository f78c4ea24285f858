#pragma once

#include <iosfwd>
#include <string>

#include "dupweight/config.hpp"

namespace dupweight {

// Artifact file names inside the output directory. Stages resolve their
// inputs and outputs against these, which is what makes them individually
// invocable and resumable.
namespace artifact {

inline constexpr const char* kVocab = "vocab.tsv";
inline constexpr const char* kModel = "model.arpa";
inline constexpr const char* kModelMeta = "model.meta.json";
inline constexpr const char* kCommonness = "commonness.jsonl";
inline constexpr const char* kPlan = "plan.jsonl";
inline constexpr const char* kManifest = "manifest.jsonl";
inline constexpr const char* kSampleIds = "sample.ids.txt";
inline constexpr const char* kSampleText = "sample.jsonl";
inline constexpr const char* kDedup = "dedup.jsonl";
inline constexpr const char* kContamination = "contamination.jsonl";
inline constexpr const char* kCorpusStats = "corpus_stats.json";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kReportJson = "report.json";

// Per-stage timing sidecar (wall-clock, so excluded from determinism
// guarantees): "<stage>.stats.json".
std::string stage_stats_name(const std::string& stage);

}  // namespace artifact

// Each stage validates the config, reads any required upstream artifacts
// from config.out_dir, and writes its outputs there. A missing upstream
// artifact raises UsageError naming the subcommand that produces it.
void run_train_lm(const PipelineConfig& config);
void run_score(const PipelineConfig& config);
void run_partition(const PipelineConfig& config);
void run_sample(const PipelineConfig& config);
void run_harddedup(const PipelineConfig& config);
void run_decontaminate(const PipelineConfig& config);

// Corpus statistics: JSON to `out` and to corpus_stats.json.
void run_stats(const PipelineConfig& config, std::ostream& out);

// Summarizes whatever artifacts exist: commonness histogram (50 log-spaced
// bins), per-segment quantile/weight table, dedup capture statistics,
// per-stage throughput. Text to `out` and report.txt; JSON to report.json.
void run_report(const PipelineConfig& config, std::ostream& out);

// train-lm -> score -> partition -> sample, plus harddedup / decontaminate
// when toggled in the config.
void run_all(const PipelineConfig& config);

}  // namespace dupweight
