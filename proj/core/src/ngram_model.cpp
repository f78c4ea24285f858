#include "dupweight/ngram_model.hpp"

#include <algorithm>
#include <cmath>

#include "dupweight/error.hpp"

namespace dupweight {

namespace {

// Stored probabilities live in (0, 1]; clamp rounding excursions above 1 and
// floor exact zeros so every table value is finite.
double log_or_floor(double p) {
  return p > 0.0 ? std::min(std::log(p), 0.0) : kLogZeroFloor;
}

bool all_tokens_equal(std::string_view key, TokenId t) {
  for (size_t i = 0; i * 4 < key.size(); ++i) {
    if (CountTable::token_at(key, i) != t) return false;
  }
  return true;
}

}  // namespace

DiscountSet compute_discounts(const std::array<uint64_t, 5>& cc) {
  DiscountSet ds;
  if (cc[1] == 0 || cc[2] == 0) {
    ds.degenerate = true;  // defaults are already the flat 0.5 triple
    return ds;
  }
  const double y =
      static_cast<double>(cc[1]) / (static_cast<double>(cc[1]) + 2.0 * static_cast<double>(cc[2]));
  auto level = [&](int i) {
    if (cc[static_cast<size_t>(i)] == 0 || cc[static_cast<size_t>(i) + 1] == 0) return 0.5;
    double d = i - (i + 1) * y *
                       (static_cast<double>(cc[static_cast<size_t>(i) + 1]) /
                        static_cast<double>(cc[static_cast<size_t>(i)]));
    if (!(d >= 0.0 && d < static_cast<double>(i))) return 0.5;
    return d;
  };
  ds.d1 = level(1);
  ds.d2 = level(2);
  ds.d3 = level(3);
  return ds;
}

NgramModel::NgramModel(int order, size_t vocab_size, TokenId unk, TokenId bos,
                       TokenId eos)
    : order_(order),
      vocab_size_(vocab_size),
      unk_id_(unk),
      bos_id_(bos),
      eos_id_(eos) {
  if (order < 1) throw UsageError("n-gram order must be >= 1");
  tables_.resize(static_cast<size_t>(order));
  discounts_.resize(static_cast<size_t>(order));
}

const StringMap<ProbEntry>& NgramModel::entries(int k) const {
  if (k < 1 || k > order_) throw InternalError("model order out of range");
  return tables_[static_cast<size_t>(k - 1)];
}

const DiscountSet& NgramModel::discounts(int k) const {
  if (k < 1 || k > order_) throw InternalError("model order out of range");
  return discounts_[static_cast<size_t>(k - 1)];
}

double NgramModel::lookup_log_prob(std::string_view packed_context, TokenId w) const {
  // Assemble packed (context . w) once; every gram and context the backoff
  // walk needs is a slice of this buffer.
  std::string key;
  key.reserve(packed_context.size() + 4);
  key.append(packed_context);
  CountTable::append_token(key, w);
  const std::string_view all(key);
  const size_t max_len = packed_context.size() / 4;

  // <bos> is never a counted continuation; the only grams ending in it are
  // pure-padding pseudo-entries that exist to carry backoff weights. Treat
  // them as absent so predicting <bos> walks the full backoff chain down to
  // the floor, exactly like the interpolated recursion.
  const bool predict_bos = (w == bos_id_);
  double backoff_sum = 0.0;
  for (size_t len = max_len;; --len) {
    std::string_view gram = all.substr(4 * (max_len - len));
    const auto& table = tables_[len];  // grams of order len+1
    if (!predict_bos) {
      auto it = table.find(gram);
      if (it != table.end()) return backoff_sum + it->second.log_prob;
    }
    if (len == 0) {
      // Token id absent even from the unigram table (an unused id in a
      // pre-tokenized corpus): smoothed mass is exactly zero.
      return backoff_sum + kLogZeroFloor;
    }
    std::string_view ctx = all.substr(4 * (max_len - len), 4 * len);
    auto cit = tables_[len - 1].find(ctx);
    if (cit != tables_[len - 1].end()) backoff_sum += cit->second.log_backoff;
    // Unstored context: backoff weight is 1, nothing to add.
  }
}

double NgramModel::log_prob(std::span<const TokenId> context, TokenId w) const {
  if (w >= vocab_size_) w = unk_id_;
  const size_t want = static_cast<size_t>(order_ - 1);
  const size_t have = std::min(context.size(), want);
  std::string ctx_key;
  ctx_key.reserve(want * 4);
  for (size_t i = 0; i < want - have; ++i) CountTable::append_token(ctx_key, bos_id_);
  for (size_t i = context.size() - have; i < context.size(); ++i) {
    TokenId c = context[i];
    CountTable::append_token(ctx_key, c >= vocab_size_ ? unk_id_ : c);
  }
  return lookup_log_prob(ctx_key, w);
}

NgramModel NgramModel::estimate(const CountTable& counts, const Vocabulary& vocab,
                                const EstimateOptions& opts) {
  const int n = counts.order();
  NgramModel model(n, vocab.size(), vocab.unk_id(), vocab.bos_id(), vocab.eos_id());
  if (counts.total_windows() == 0) {
    throw DataError("cannot estimate a model from an empty corpus");
  }

  // Adjusted counts. Top order keeps raw counts. Below, a gram's count is the
  // number of distinct single-token left extensions with positive raw count,
  // except <bos>-initial grams (which no token can precede) keep raw counts.
  std::vector<StringMap<uint64_t>> adj(static_cast<size_t>(n));
  adj[static_cast<size_t>(n - 1)] = counts.grams(n);
  for (int k = n - 1; k >= 1; --k) {
    auto& tgt = adj[static_cast<size_t>(k - 1)];
    const auto& raw_k = counts.grams(k);
    const auto& raw_above = counts.grams(k + 1);
    tgt.reserve(raw_k.size());
    for (const auto& [g, c] : raw_k) {
      if (CountTable::token_at(g, 0) == vocab.bos_id()) tgt.emplace(g, c);
    }
    for (const auto& [h, c] : raw_above) {
      std::string_view g = std::string_view(h).substr(4);
      if (CountTable::token_at(g, 0) == vocab.bos_id()) continue;
      auto it = tgt.find(g);
      if (it == tgt.end()) {
        tgt.emplace(std::string(g), uint64_t{1});
      } else {
        ++it->second;
      }
    }
  }

  // Discount triples from count-of-count statistics of the adjusted counts
  // (pre-pruning).
  for (int k = 1; k <= n; ++k) {
    std::array<uint64_t, 5> cc{};
    for (const auto& [g, a] : adj[static_cast<size_t>(k - 1)]) {
      if (a <= 4) ++cc[a];
    }
    model.discounts_[static_cast<size_t>(k - 1)] = compute_discounts(cc);
    if (model.discounts_[static_cast<size_t>(k - 1)].degenerate) {
      model.warnings_.push_back(
          "order " + std::to_string(k) +
          ": degenerate count-of-count statistics; using flat 0.5 discounts");
    }
  }

  // Pruning survivors, top order first so protection (prefixes and suffixes
  // of survivors) propagates transitively downward. Unigrams always survive.
  const bool prune = opts.min_count > 1;
  std::vector<StringMap<char>> survivors(prune ? static_cast<size_t>(n) : 0);
  if (prune) {
    for (int k = n; k >= 2; --k) {
      auto& surv = survivors[static_cast<size_t>(k - 1)];
      for (const auto& [g, a] : adj[static_cast<size_t>(k - 1)]) {
        if (a >= opts.min_count && surv.find(g) == surv.end()) {
          surv.emplace(g, char{1});
        }
      }
      if (k - 1 >= 2) {
        auto& lower = survivors[static_cast<size_t>(k - 2)];
        for (const auto& [g, mark] : surv) {
          std::string_view sv(g);
          std::string_view prefix = sv.substr(0, sv.size() - 4);
          std::string_view suffix = sv.substr(4);
          if (lower.find(prefix) == lower.end()) lower.emplace(std::string(prefix), char{1});
          if (lower.find(suffix) == lower.end()) lower.emplace(std::string(suffix), char{1});
        }
      }
    }
  }
  auto survives = [&](int k, std::string_view g) {
    if (!prune || k == 1) return true;
    const auto& surv = survivors[static_cast<size_t>(k - 1)];
    return surv.find(g) != surv.end();
  };

  // Unigram distribution: leftover mass becomes a point mass on <unk>.
  {
    const auto& a1 = adj[0];
    uint64_t total = 0;
    std::array<uint64_t, 4> buckets{};  // index min(count, 3)
    for (const auto& [g, a] : a1) {
      total += a;
      ++buckets[static_cast<size_t>(std::min<uint64_t>(a, 3))];
    }
    if (total == 0) throw DataError("cannot estimate a model from an empty corpus");
    const DiscountSet& ds = model.discounts_[0];
    const double gamma = (ds.d1 * static_cast<double>(buckets[1]) +
                          ds.d2 * static_cast<double>(buckets[2]) +
                          ds.d3 * static_cast<double>(buckets[3])) /
                         static_cast<double>(total);
    std::string unk_key;
    CountTable::append_token(unk_key, vocab.unk_id());
    auto& t1 = model.tables_[0];
    t1.reserve(a1.size() + 2);
    for (const auto& [g, a] : a1) {
      double p = (static_cast<double>(a) - ds.apply(a)) / static_cast<double>(total);
      if (g == unk_key) p += gamma;
      t1.emplace(g, ProbEntry{log_or_floor(p), 0.0});
    }
    if (t1.find(unk_key) == t1.end()) {
      t1.emplace(unk_key, ProbEntry{log_or_floor(gamma), 0.0});
    }
    std::string bos_key;
    CountTable::append_token(bos_key, vocab.bos_id());
    if (!t1.emplace(bos_key, ProbEntry{kLogZeroFloor, 0.0}).second) {
      throw InternalError("<bos> appeared as a counted unigram");
    }
  }

  // Higher orders, bottom-up; lower-order interpolation weights are read
  // through the finished tables via the standard backoff walk.
  for (int k = 2; k <= n; ++k) {
    const auto& ak = adj[static_cast<size_t>(k - 1)];
    std::vector<std::string_view> keys;
    keys.reserve(ak.size());
    for (const auto& [g, a] : ak) keys.push_back(g);
    std::sort(keys.begin(), keys.end());

    const DiscountSet& ds = model.discounts_[static_cast<size_t>(k - 1)];
    auto& tk = model.tables_[static_cast<size_t>(k - 1)];
    tk.reserve(ak.size());
    const size_t ctx_bytes = 4 * static_cast<size_t>(k - 1);

    size_t i = 0;
    while (i < keys.size()) {
      const std::string_view ctx = keys[i].substr(0, ctx_bytes);
      size_t j = i;
      uint64_t total = 0;
      uint64_t pruned_mass = 0;
      std::array<uint64_t, 4> buckets{};
      size_t surviving = 0;
      while (j < keys.size() && keys[j].substr(0, ctx_bytes) == ctx) {
        const uint64_t a = ak.find(keys[j])->second;
        total += a;
        if (survives(k, keys[j])) {
          ++buckets[static_cast<size_t>(std::min<uint64_t>(a, 3))];
          ++surviving;
        } else {
          pruned_mass += a;
        }
        ++j;
      }
      if (surviving > 0) {
        const double gamma = (ds.d1 * static_cast<double>(buckets[1]) +
                              ds.d2 * static_cast<double>(buckets[2]) +
                              ds.d3 * static_cast<double>(buckets[3]) +
                              static_cast<double>(pruned_mass)) /
                             static_cast<double>(total);
        // The context's entry carries gamma as its backoff weight. Contexts
        // of counted grams are themselves counted, except pure-<bos> padding,
        // which gets a floored pseudo-entry.
        auto& lower_table = model.tables_[static_cast<size_t>(k - 2)];
        auto cit = lower_table.find(ctx);
        if (cit == lower_table.end()) {
          if (!all_tokens_equal(ctx, vocab.bos_id())) {
            throw InternalError("missing context entry for stored gram");
          }
          cit = lower_table.emplace(std::string(ctx), ProbEntry{kLogZeroFloor, 0.0}).first;
        }
        cit->second.log_backoff = log_or_floor(gamma);

        for (size_t t = i; t < j; ++t) {
          if (!survives(k, keys[t])) continue;
          const uint64_t a = ak.find(keys[t])->second;
          const TokenId w = CountTable::token_at(keys[t], static_cast<size_t>(k - 1));
          const double lower_lp = model.lookup_log_prob(ctx.substr(4), w);
          const double p =
              (static_cast<double>(a) - ds.apply(a)) / static_cast<double>(total) +
              gamma * std::exp(lower_lp);
          tk.emplace(std::string(keys[t]), ProbEntry{log_or_floor(p), 0.0});
        }
      }
      i = j;
    }
  }

  return model;
}

}  // namespace dupweight
