#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace dupweight {

// SplitMix64 finalizer: a strong 64->64 bit mixer (full avalanche).
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// FNV-1a over bytes; used for provenance digests, not for hash tables.
uint64_t fnv1a64(const void* data, size_t len,
                 uint64_t seed = 0xCBF29CE484222325ull);

inline uint64_t fnv1a64(std::string_view s,
                        uint64_t seed = 0xCBF29CE484222325ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

// A (literal, seed) call would otherwise silently bind to the
// (pointer, length) overload above with the seed as the length.
uint64_t fnv1a64(const char* s, uint64_t seed) = delete;

// Seeded hash of a token sequence with mix64 applied per step; the seed
// selects an independent stream (minhash derives its H streams this way).
uint64_t hash_tokens(std::span<const uint32_t> tokens, uint64_t seed);

// 16-char lowercase hex.
std::string hex64(uint64_t v);

// FNV-1a of a whole file's bytes. Throws DataError if unreadable.
uint64_t file_digest(const std::string& path);

// Polynomial rolling hash over token ids, mod 2^64: for window w_1..w_L,
// digest = sum w_i * B^(L-i). Collisions are tolerated by design — every
// hit is verified against the actual tokens downstream.
class RollingTokenHash {
 public:
  explicit RollingTokenHash(size_t window);

  // Feed the next token; once `window` tokens are in, digest() is valid and
  // the oldest token must be supplied to roll().
  void push(uint32_t in) { digest_ = digest_ * kBase + in + 1; }
  void roll(uint32_t in, uint32_t out) {
    digest_ = (digest_ - (out + 1) * top_power_) * kBase + in + 1;
  }
  uint64_t digest() const { return digest_; }
  void reset() { digest_ = 0; }

 private:
  static constexpr uint64_t kBase = 257;
  uint64_t top_power_;  // kBase^(window-1)
  uint64_t digest_ = 0;
};

}  // namespace dupweight
