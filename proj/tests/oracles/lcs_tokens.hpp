#pragma once

#include <span>

#include "dupweight/document.hpp"

namespace oracle {

// Length of the longest common CONTIGUOUS token run between two sequences,
// by the classic quadratic dynamic program (one rolling row). This is the
// independent check for overlap-based contamination flagging.
uint64_t longest_common_run(std::span<const dupweight::TokenId> a,
                            std::span<const dupweight::TokenId> b);

}  // namespace oracle
