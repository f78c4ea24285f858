#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dupweight/document.hpp"

namespace dupweight {

// Effective settings for every stage. Populated from defaults, then a flat
// key=value config file, then command-line flags (highest precedence).
struct PipelineConfig {
  std::vector<std::string> inputs;       // training corpus files
  std::vector<std::string> test_inputs;  // held-out corpus (decontamination)
  std::string out_dir = "out";
  int workers = 1;

  // Ingestion.
  std::string on_bad_line = "fail";  // fail | skip
  bool allow_empty = false;

  // Tokenizer / model.
  std::string tokenizer_mode = "whitespace";  // whitespace | passthrough
  int n = 4;
  uint64_t min_count = 1;

  // Reweighting. Exactly one of {T, target_ratio} may be set; with neither,
  // target_ratio defaults to 10.
  int K = 20;
  double T = -1.0;             // < 0 means unset
  double target_ratio = -1.0;  // < 0 means unset
  std::string quantile_stat = "upper";  // upper | median

  // Sampling.
  uint64_t token_budget = 0;
  uint64_t seed = 1;
  std::string sample_format = "id-list";  // id-list | text

  // Hard dedup.
  int num_hashes = 128;
  int shingle_width = 5;
  int bands = 16;
  int rows = 8;
  std::string keep_policy = "first-id";  // first-id | longest

  // Decontamination.
  uint64_t threshold = 50;
  std::string apply_out;  // when set, decontaminate also writes the filtered corpus

  // Stage toggles for the full `run`.
  bool run_harddedup = false;
  bool run_decontaminate = false;

  IngestOptions ingest_options() const;

  // Hex digest over the semantic fields (out_dir and workers excluded: they
  // must not change artifact bytes). Embedded in every artifact header.
  std::string digest() const;

  void validate() const;

  // Resolves the {T, target_ratio} pair: returns true when T was given
  // directly, false when a ratio (explicit or the default 10) applies.
  bool exponent_given(double* t_out, double* ratio_out) const;
};

// Applies one key=value assignment (shared by the file parser and the CLI).
// Unknown keys fail with UsageError.
void apply_config_entry(PipelineConfig& config, const std::string& key,
                        const std::string& value);

// Flat key=value file; '#' starts a comment; `input` and `test_input` repeat.
void load_config_file(PipelineConfig& config, const std::string& path);

}  // namespace dupweight
