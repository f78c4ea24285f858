#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dupweight/document.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/ngram_counts.hpp"
#include "dupweight/tokenizer.hpp"

namespace dupweight {

inline constexpr double kLn10 = 2.302585092994045684;
// Natural-log twin of the conventional ARPA "-99" log10 sentinel; used for
// events with zero smoothed probability (e.g. <s> as a predicted token) so
// every query stays finite.
inline constexpr double kLogZeroFloor = -99.0 * kLn10;

// Three-level discounts for one order: counts 1, 2, >=3 get d1, d2, d3.
struct DiscountSet {
  double d1 = 0.5;
  double d2 = 0.5;
  double d3 = 0.5;
  bool degenerate = false;  // whole order fell back to flat 0.5

  double apply(uint64_t count) const {
    if (count == 0) return 0.0;
    if (count == 1) return d1;
    if (count == 2) return d2;
    return d3;
  }
};

// count_of_counts[i] = number of distinct grams with adjusted count i, for
// i in 1..4 (index 0 unused). Closed-form estimates
//   Y = n1 / (n1 + 2 n2),   D_i = i - (i+1) Y n_{i+1} / n_i
// with two safety nets: if n1 or n2 is zero the whole order degenerates to a
// flat 0.5, and any single level whose statistics vanish or whose estimate
// leaves [0, i) falls back to 0.5 on its own.
DiscountSet compute_discounts(const std::array<uint64_t, 5>& count_of_counts);

struct EstimateOptions {
  // Orders >= 2: grams with adjusted count below this are dropped and their
  // mass folded into the context's backoff weight. Prefixes and suffixes of
  // surviving grams are kept regardless, so every stored gram retains its
  // context entry. Unigrams are never pruned.
  uint64_t min_count = 1;
};

struct ProbEntry {
  double log_prob = kLogZeroFloor;  // natural log
  double log_backoff = 0.0;         // ln(gamma); 0 means no mass reserved
};

// Interpolated modified Kneser-Ney n-gram model over token ids.
//
// Stored probabilities are fully interpolated:
//   P_k(w|u) = (a(u.w) - D_k(a))_+ / total(u) + gamma(u) P_{k-1}(w|u')
// where a() are adjusted counts (raw at the top order, distinct left
// extensions below, except that <bos>-initial grams keep raw counts),
// gamma(u) = (D1 N1 + D2 N2 + D3 N3 + pruned mass) / total(u), and the
// unigram recursion bottoms out in a point mass on <unk>. Queries follow the
// standard longest-match backoff walk, so P(.|u) sums to 1 over the
// vocabulary for every context u.
class NgramModel {
 public:
  static NgramModel estimate(const CountTable& counts, const Vocabulary& vocab,
                             const EstimateOptions& opts = {});

  int order() const { return order_; }
  size_t vocab_size() const { return vocab_size_; }
  TokenId unk_id() const { return unk_id_; }
  TokenId bos_id() const { return bos_id_; }
  TokenId eos_id() const { return eos_id_; }

  // ln P(w | context). Uses the last order-1 context tokens; shorter
  // contexts are implicitly <bos>-padded. Token ids outside the vocabulary
  // map to <unk>. Always finite, <= 0 up to rounding.
  double log_prob(std::span<const TokenId> context, TokenId w) const;

  const StringMap<ProbEntry>& entries(int k) const;  // k in [1, order]
  const DiscountSet& discounts(int k) const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  friend struct ArpaLoader;  // reconstructs tables when reading the text format

  NgramModel(int order, size_t vocab_size, TokenId unk, TokenId bos, TokenId eos);

  double lookup_log_prob(std::string_view packed_context, TokenId w) const;

  int order_;
  size_t vocab_size_;
  TokenId unk_id_;
  TokenId bos_id_;
  TokenId eos_id_;
  std::vector<StringMap<ProbEntry>> tables_;  // index k-1
  std::vector<DiscountSet> discounts_;        // index k-1
  std::vector<std::string> warnings_;
};

}  // namespace dupweight
