#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dupweight/document.hpp"
#include "dupweight/tokenizer.hpp"

namespace fx {

// Self-deleting temporary directory.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const;

 private:
  std::string path_;
};

// "doc-0042" style ids; fixed width keeps lexicographic == numeric order.
std::string padded_id(const std::string& prefix, uint64_t i, int width = 4);

// One JSONL line per document: {"id": ..., "text": ...} with proper JSON
// escaping.
void write_corpus(const std::string& path,
                  const std::vector<dupweight::Document>& docs);

void write_raw_lines(const std::string& path,
                     const std::vector<std::string>& lines);

// In-memory whitespace-tokenized corpus: one shared vocabulary over all
// texts, docs in input order with ids doc-0000, doc-0001, ...
struct TinyCorpus {
  dupweight::Vocabulary vocab;
  std::vector<dupweight::TokenizedDocument> docs;

  dupweight::TokenId id(const std::string& surface) const;
  std::vector<dupweight::TokenId> ids(const std::string& text) const;
};

TinyCorpus make_corpus(const std::vector<std::string>& texts);
TinyCorpus make_corpus(const std::vector<dupweight::Document>& docs);

// Deterministic synthetic documents with texts over surfaces w0..w{V-1}.
std::vector<dupweight::Document> synthetic_docs(size_t n_docs,
                                                size_t tokens_per_doc,
                                                size_t vocab_size,
                                                uint64_t seed);

// Deterministic synthetic token sequences over ids [0, vocab).
std::vector<dupweight::TokenizedDocument> synthetic_token_docs(
    size_t n_docs, size_t tokens_per_doc, dupweight::TokenId vocab,
    uint64_t seed);

}  // namespace fx
