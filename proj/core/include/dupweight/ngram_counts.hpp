#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dupweight/document.hpp"
#include "dupweight/io_util.hpp"

namespace dupweight {

// Exact k-gram counts for k = 1..n.
//
// Counting convention: each document is padded to
//   <bos> x (n-1), w_1..w_m, <eos>
// and one full n-gram window ends at every scored position (w_1..w_m and
// <eos>), m+1 windows in total. The order-k count of a gram is the number
// of windows whose k-token suffix equals it. Consequences the model and
// tests rely on:
//   - n-grams never span document boundaries;
//   - no gram ever ends in <bos>, and pure-padding grams are never counted;
//   - for k < n, counts marginalize exactly over left extensions:
//     c_k(g) = sum_v c_{k+1}(v.g), with no edge corrections.
//
// Keys are token ids packed big-endian (4 bytes each), so byte-wise
// lexicographic order equals id-sequence order.
class CountTable {
 public:
  explicit CountTable(int order);

  int order() const { return order_; }
  uint64_t total_windows() const { return total_windows_; }

  void add_document(std::span<const TokenId> tokens, TokenId bos, TokenId eos);

  // Associative and commutative; `other` is consumed.
  void merge_from(CountTable&& other);

  const StringMap<uint64_t>& grams(int k) const;  // k in [1, order]

  // Versioned binary shard format (parallel counting checkpoint).
  void save(const std::string& path, uint64_t vocab_fingerprint) const;
  static CountTable load(const std::string& path,
                         uint64_t* vocab_fingerprint_out = nullptr);

  static std::string pack(std::span<const TokenId> gram);
  static void append_token(std::string& key, TokenId t);
  static std::vector<TokenId> unpack(std::string_view key);
  static TokenId token_at(std::string_view key, size_t index);

 private:
  int order_;
  uint64_t total_windows_ = 0;
  std::vector<StringMap<uint64_t>> grams_;  // index k-1
  std::vector<TokenId> padded_;             // scratch
  std::string window_key_;                  // scratch
};

// In-memory parallel counting; result is independent of `workers`.
CountTable count_documents(std::span<const TokenizedDocument> docs, int order,
                           TokenId bos, TokenId eos, int workers);

}  // namespace dupweight
