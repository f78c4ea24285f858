#include "dupweight/minhash.hpp"

#include <algorithm>
#include <limits>

#include "dupweight/error.hpp"
#include "dupweight/hashing.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/parallel.hpp"

namespace dupweight {

namespace {

// Stream i's mixing key; derived once per signature call (H is small).
std::vector<uint64_t> stream_keys(const MinHashParams& params) {
  std::vector<uint64_t> keys(static_cast<size_t>(params.num_hashes));
  for (size_t i = 0; i < keys.size(); ++i) {
    keys[i] = mix64(params.seed + 0x9E3779B97F4A7C15ULL * (i + 1));
  }
  return keys;
}

}  // namespace

MinHashSignature minhash_signature(std::string doc_id,
                                   std::span<const TokenId> tokens,
                                   const MinHashParams& params) {
  if (params.num_hashes < 1) throw UsageError("signature length H must be >= 1");
  if (params.shingle_width < 1) throw UsageError("shingle width must be >= 1");

  MinHashSignature sig;
  sig.doc_id = std::move(doc_id);
  sig.values.assign(static_cast<size_t>(params.num_hashes),
                    std::numeric_limits<uint64_t>::max());
  const auto keys = stream_keys(params);

  const size_t w = static_cast<size_t>(params.shingle_width);
  // Duplicate shingles cannot change a minimum, so the multiset of windows
  // stands in for the shingle set.
  auto absorb = [&](std::span<const TokenId> shingle) {
    const uint64_t base = hash_tokens(shingle, params.seed);
    for (size_t i = 0; i < keys.size(); ++i) {
      const uint64_t v = mix64(base ^ keys[i]);
      if (v < sig.values[i]) sig.values[i] = v;
    }
  };

  if (tokens.size() < w) {
    absorb(tokens);
  } else {
    for (size_t start = 0; start + w <= tokens.size(); ++start) {
      absorb(tokens.subspan(start, w));
    }
  }
  return sig;
}

std::vector<MinHashSignature> minhash_corpus(std::span<const TokenizedDocument> docs,
                                             const MinHashParams& params,
                                             int workers) {
  std::vector<MinHashSignature> out(docs.size());
  parallel_chunks(docs.size(), workers, [&](size_t begin, size_t end, int) {
    for (size_t i = begin; i < end; ++i) {
      out[i] = minhash_signature(docs[i].id, docs[i].tokens, params);
    }
  });
  return out;
}

std::vector<std::pair<uint32_t, uint32_t>> lsh_candidate_pairs(
    std::span<const MinHashSignature> signatures, const LshParams& params) {
  if (params.bands < 1 || params.rows < 1) {
    throw UsageError("bands and rows must be >= 1");
  }
  size_t h = signatures.empty() ? 0 : signatures.front().values.size();
  if (!signatures.empty() &&
      static_cast<size_t>(params.bands) * static_cast<size_t>(params.rows) != h) {
    throw UsageError("bands*rows (" + std::to_string(params.bands) + "*" +
                     std::to_string(params.rows) +
                     ") must equal signature length " + std::to_string(h));
  }

  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  // Buckets keyed by the band's raw bytes: co-bucketing requires the r row
  // values to match exactly. Bands processed one at a time to bound memory.
  for (int band = 0; band < params.bands; ++band) {
    StringMap<std::vector<uint32_t>> buckets;
    buckets.reserve(signatures.size());
    const size_t offset = static_cast<size_t>(band) * static_cast<size_t>(params.rows);
    std::string key(static_cast<size_t>(params.rows) * 8, '\0');
    for (size_t i = 0; i < signatures.size(); ++i) {
      if (signatures[i].values.size() != h) {
        throw InternalError("inconsistent signature length in corpus");
      }
      for (int r = 0; r < params.rows; ++r) {
        const uint64_t v = signatures[i].values[offset + static_cast<size_t>(r)];
        for (int byte = 0; byte < 8; ++byte) {
          key[static_cast<size_t>(r) * 8 + static_cast<size_t>(byte)] =
              static_cast<char>((v >> (8 * byte)) & 0xFF);
        }
      }
      auto it = buckets.find(key);
      if (it == buckets.end()) {
        buckets.emplace(key, std::vector<uint32_t>{static_cast<uint32_t>(i)});
      } else {
        it->second.push_back(static_cast<uint32_t>(i));
      }
    }
    for (const auto& [key, members] : buckets) {
      for (size_t a = 0; a < members.size(); ++a) {
        for (size_t b = a + 1; b < members.size(); ++b) {
          pairs.emplace_back(std::min(members[a], members[b]),
                             std::max(members[a], members[b]));
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

double signature_match_fraction(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.values.size() != b.values.size() || a.values.empty()) {
    throw UsageError("signatures must have equal nonzero length");
  }
  size_t matches = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] == b.values[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(a.values.size());
}

}  // namespace dupweight
