#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dupweight/document.hpp"
#include "dupweight/rng.hpp"

namespace bench {

// Zipf-ish synthetic corpus over a closed vocabulary: realistic enough for
// throughput numbers (skewed token frequencies, many repeated n-grams).
inline std::vector<dupweight::TokenizedDocument> synthetic_corpus(
    size_t docs, size_t tokens_per_doc, uint32_t vocab_size, uint64_t seed) {
  dupweight::SplitMix64 rng(seed);
  std::vector<dupweight::TokenizedDocument> out(docs);
  for (size_t d = 0; d < docs; ++d) {
    out[d].id = "doc-" + std::to_string(d);
    out[d].tokens.resize(tokens_per_doc);
    for (size_t i = 0; i < tokens_per_doc; ++i) {
      // Square a uniform draw to skew toward small ids.
      const double u = rng.uniform01();
      out[d].tokens[i] =
          static_cast<uint32_t>(u * u * static_cast<double>(vocab_size));
    }
  }
  return out;
}

}  // namespace bench
