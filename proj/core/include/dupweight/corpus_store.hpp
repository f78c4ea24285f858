#pragma once

#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "dupweight/document.hpp"

namespace dupweight {

// Streams records from line-delimited JSON files, one document per line:
//   {"id": "optional-string", "text": "required", "tokens": [optional ints]}
// Documents arrive in file order, files in argument order. Missing ids are
// synthesized as "<filename>:<line-number>" so reruns over the same files
// produce identical identities. Duplicate ids are always fatal.
class JsonlReader {
 public:
  JsonlReader(std::vector<std::string> paths, IngestOptions opts);
  JsonlReader(const JsonlReader&) = delete;
  JsonlReader& operator=(const JsonlReader&) = delete;

  // Returns false at end of corpus. Throws DataError per policy.
  bool next(RawRecord& out);

  uint64_t accepted() const { return accepted_; }
  uint64_t skipped() const { return skipped_; }
  uint64_t byte_count() const { return byte_count_; }

 private:
  bool open_next_file();
  bool parse_line(const std::string& line, RawRecord& out, std::string* error);

  std::vector<std::string> paths_;
  IngestOptions opts_;
  size_t file_index_ = 0;
  std::unique_ptr<std::ifstream> stream_;
  std::string current_file_;
  uint64_t line_no_ = 0;
  uint64_t accepted_ = 0;
  uint64_t skipped_ = 0;
  uint64_t byte_count_ = 0;
  std::unordered_set<std::string> seen_ids_;
};

// Loads a whole corpus into memory (fixtures and small inputs).
std::vector<RawRecord> read_corpus(const std::vector<std::string>& paths,
                                   const IngestOptions& opts);

// Streams the corpus in batches of `batch_size` records; keeps memory
// bounded for large inputs while letting callers parallelize per batch.
void for_each_batch(const std::vector<std::string>& paths,
                    const IngestOptions& opts, size_t batch_size,
                    const std::function<void(std::vector<RawRecord>&)>& fn,
                    CorpusStats* stats_out = nullptr);

}  // namespace dupweight
