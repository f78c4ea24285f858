#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dupweight/corpus_store.hpp"
#include "dupweight/document.hpp"

namespace dupweight {

struct ContaminationFinding {
  std::string train_doc_id;
  std::string test_doc_id;   // strongest evidence: longest overlap, then smallest id
  uint64_t overlap_len = 0;  // maximal contiguous shared token run, > threshold
};

// A train document is flagged iff it shares a contiguous token run of more
// than `threshold` tokens (i.e. a window of threshold+1) with any test
// document. Every (threshold+1)-token window of the test corpus goes into a
// rolling-hash index; train windows that hit are verified token-by-token
// (hash collisions cannot flag) and extended to the maximal run for the
// report. One finding per flagged train document, sorted by train_doc_id.
std::vector<ContaminationFinding> find_contaminated(
    std::span<const TokenizedDocument> train,
    std::span<const TokenizedDocument> test, uint64_t threshold, int workers);

struct ContaminationReport {
  uint64_t threshold = 50;
  uint64_t train_docs = 0;
  uint64_t test_docs = 0;
  // Chained digest over the (id, text) of surviving train records in corpus
  // order; apply() refuses a corpus whose surviving set differs.
  std::string keep_digest;
  std::vector<ContaminationFinding> findings;
};

// Digest over the records of `paths` whose ids are NOT in `flagged`.
std::string surviving_digest(const std::vector<std::string>& paths,
                             const IngestOptions& opts,
                             std::span<const std::string> flagged);

void write_contamination(const std::string& path, const ContaminationReport& report,
                         const std::string& config_digest);

struct ContaminationFile {
  std::string config_digest;
  ContaminationReport report;
};

ContaminationFile read_contamination(const std::string& path);

struct ApplyStats {
  uint64_t kept = 0;
  uint64_t removed = 0;
};

// Writes the corpus minus flagged documents, preserving each surviving
// line's original bytes. Errors if the corpus's surviving set does not match
// the report's keep digest (wrong or already-divergent corpus).
ApplyStats apply_contamination(const ContaminationReport& report,
                               const std::vector<std::string>& corpus_paths,
                               const IngestOptions& opts,
                               const std::string& out_path);

}  // namespace dupweight
