#include "dupweight/hashing.hpp"

#include <cstdio>
#include <fstream>

#include "dupweight/error.hpp"

namespace dupweight {

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

uint64_t hash_tokens(std::span<const uint32_t> tokens, uint64_t seed) {
  uint64_t h = mix64(seed ^ 0x9E3779B97F4A7C15ull);
  for (uint32_t t : tokens) {
    h = mix64(h ^ (static_cast<uint64_t>(t) + 0x9E3779B97F4A7C15ull));
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf, 16);
}

uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path);
  uint64_t h = 0xCBF29CE484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
  }
  return h;
}

RollingTokenHash::RollingTokenHash(size_t window) {
  top_power_ = 1;
  for (size_t i = 1; i < window; ++i) top_power_ *= kBase;
}

}  // namespace dupweight
