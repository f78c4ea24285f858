#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dupweight/document.hpp"
#include "dupweight/io_util.hpp"

namespace dupweight {

// Immutable id<->surface mapping. Data ids occupy [0, data_size);
// the reserved ids <unk>, <bos>, <eos> sit directly above the data range,
// so surface text can never produce them.
//
// whitespace mode: surfaces sorted lexicographically get ids 0..S-1
//   (two-pass build: count surfaces in parallel, then assign by sort order,
//   making the mapping independent of worker count).
// passthrough mode: data ids are the user's integers verbatim; the
//   vocabulary only records the id range.
class Vocabulary {
 public:
  enum class Mode { kWhitespace, kPassthrough };

  Vocabulary() = default;

  // `surfaces` must be sorted, unique, and whitespace-free.
  static Vocabulary freeze_whitespace(std::vector<std::string> surfaces);
  static Vocabulary freeze_passthrough(uint64_t data_size);

  Mode mode() const { return mode_; }
  size_t size() const { return data_size_ + 3; }
  size_t data_size() const { return data_size_; }
  TokenId unk_id() const { return static_cast<TokenId>(data_size_); }
  TokenId bos_id() const { return static_cast<TokenId>(data_size_ + 1); }
  TokenId eos_id() const { return static_cast<TokenId>(data_size_ + 2); }

  std::optional<TokenId> find(std::string_view surface) const;
  std::string surface(TokenId id) const;

  uint64_t fingerprint() const;

  void save(const std::string& path, std::string_view config_digest) const;
  static Vocabulary load(const std::string& path);

 private:
  Mode mode_ = Mode::kWhitespace;
  std::vector<std::string> surfaces_;  // whitespace mode only; id = index
  StringMap<TokenId> index_;
  size_t data_size_ = 0;
};

// Accumulates the statistics freeze() needs; shards merge associatively.
class VocabularyBuilder {
 public:
  void add_text(std::string_view text);  // NFC + whitespace split + count
  void add_tokens(const std::vector<TokenId>& tokens);
  void merge(VocabularyBuilder&& other);
  Vocabulary freeze(Vocabulary::Mode mode) const;

 private:
  StringMap<uint64_t> counts_;
  uint64_t passthrough_size_ = 0;  // max data id + 1 seen so far
};

// Tokenize against a frozen vocabulary. whitespace: NFC, split, map
// (unseen surfaces -> <unk>); passthrough: record's `tokens` verbatim with
// out-of-range ids mapped to <unk>. Throws DataError when the document is
// empty after normalization, or lacks `tokens` in passthrough mode.
TokenizedDocument tokenize(const RawRecord& rec, const Vocabulary& vocab);

// Vocabulary-less convenience: whitespace split with first-seen id
// assignment. Useful for single-document inspection; the pipeline always
// tokenizes against a frozen vocabulary instead.
TokenizedDocument tokenize_adhoc(const Document& doc);

// Token count without a vocabulary (stats pass).
uint64_t count_tokens(const RawRecord& rec, Vocabulary::Mode mode);

}  // namespace dupweight
