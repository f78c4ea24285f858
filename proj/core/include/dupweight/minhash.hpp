#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dupweight/document.hpp"

namespace dupweight {

struct MinHashParams {
  int num_hashes = 128;   // H: signature length
  int shingle_width = 5;  // w: tokens per shingle
  uint64_t seed = 0;      // hash-family seed
};

struct MinHashSignature {
  std::string doc_id;
  std::vector<uint64_t> values;  // length H
};

// signature[i] = min over the document's w-token shingles of stream i's hash
// of the shingle. One seeded base hash per shingle, H derived streams via
// per-stream mixing constants; no permutation tables. Documents shorter than
// w contribute their whole token sequence as a single shingle.
MinHashSignature minhash_signature(std::string doc_id,
                                   std::span<const TokenId> tokens,
                                   const MinHashParams& params);

std::vector<MinHashSignature> minhash_corpus(std::span<const TokenizedDocument> docs,
                                             const MinHashParams& params,
                                             int workers);

struct LshParams {
  int bands = 16;  // b
  int rows = 8;    // r; b*r must equal the signature length
};

// Candidate pairs: signatures whose values match exactly across all r rows
// of at least one band. Pairs are (i, j) indices into `signatures` with
// i < j, sorted and deduplicated.
std::vector<std::pair<uint32_t, uint32_t>> lsh_candidate_pairs(
    std::span<const MinHashSignature> signatures, const LshParams& params);

// Fraction of equal coordinates — the unbiased Jaccard estimate.
double signature_match_fraction(const MinHashSignature& a, const MinHashSignature& b);

}  // namespace dupweight
