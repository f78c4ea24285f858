#include "oracles/jaccard_exact.hpp"

#include <algorithm>
#include <set>

namespace oracle {

using dupweight::TokenId;

namespace {

std::set<std::vector<TokenId>> shingle_set(std::span<const TokenId> doc,
                                           int width) {
  std::set<std::vector<TokenId>> out;
  const size_t w = static_cast<size_t>(width);
  if (doc.size() < w) {  // whole sequence as one shingle, even when empty
    out.emplace(doc.begin(), doc.end());
    return out;
  }
  for (size_t i = 0; i + w <= doc.size(); ++i) {
    out.emplace(doc.begin() + static_cast<long>(i),
                doc.begin() + static_cast<long>(i + w));
  }
  return out;
}

}  // namespace

double jaccard_exact(std::span<const TokenId> a, std::span<const TokenId> b,
                     int shingle_width) {
  const auto sa = shingle_set(a, shingle_width);
  const auto sb = shingle_set(b, shingle_width);
  size_t inter = 0;
  for (const auto& s : sa) inter += sb.count(s);
  const size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace oracle
