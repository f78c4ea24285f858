#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dupweight {

using TokenId = uint32_t;

struct Document {
  std::string id;    // non-empty, unique within the corpus
  std::string text;  // UTF-8, kept byte-verbatim from ingestion
};

// One parsed corpus line. `tokens` is present only for records carrying a
// pre-tokenized `tokens` field (passthrough mode input).
struct RawRecord {
  std::string id;
  std::string text;
  std::optional<std::vector<TokenId>> tokens;
  std::string source_file;
  uint64_t line_no = 0;  // 1-based
  std::string raw;       // original line bytes; filled only with keep_raw
};

struct TokenizedDocument {
  std::string id;
  std::vector<TokenId> tokens;  // N = tokens.size() >= 1 once accepted
};

struct CorpusStats {
  uint64_t doc_count = 0;
  uint64_t token_count = 0;  // 0 until a tokenization pass has run
  uint64_t byte_count = 0;   // UTF-8 bytes of accepted `text` fields
  uint64_t skipped_lines = 0;
};

enum class LinePolicy {
  kFailFast,     // malformed line aborts ingestion
  kSkipAndCount  // malformed line is skipped and counted
};

struct IngestOptions {
  LinePolicy policy = LinePolicy::kFailFast;
  bool allow_empty = false;  // commonness is undefined for empty documents
  bool keep_raw = false;     // carry original line bytes on each record
};

}  // namespace dupweight
