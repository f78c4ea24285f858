#include "oracles/lcs_tokens.hpp"

#include <algorithm>
#include <vector>

namespace oracle {

uint64_t longest_common_run(std::span<const dupweight::TokenId> a,
                            std::span<const dupweight::TokenId> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<uint64_t> row(b.size() + 1, 0);
  uint64_t best = 0;
  for (size_t i = 1; i <= a.size(); ++i) {
    uint64_t diag = 0;  // row[j-1] from the previous iteration of i
    for (size_t j = 1; j <= b.size(); ++j) {
      const uint64_t up_left = diag;
      diag = row[j];
      row[j] = (a[i - 1] == b[j - 1]) ? up_left + 1 : 0;
      best = std::max(best, row[j]);
    }
  }
  return best;
}

}  // namespace oracle
