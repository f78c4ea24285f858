#pragma once

#include <cstdint>
#include <vector>

namespace dupweight {

// SplitMix64 (Steele, Lea, Flood: "Fast Splittable Pseudorandom Number
// Generators"). Chosen over std::mt19937_64 + std::uniform_*_distribution
// because the standard distributions are implementation-defined: manifests
// must replay byte-identically on any platform, so every bit of the draw
// path is specified here.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1); 53 significant bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0. Multiply-shift map (Lemire).
  // The ~2^-64 * bound selection bias is far below anything our Monte-Carlo
  // tolerances can see and keeps the draw at exactly one generator call.
  uint64_t below(uint64_t bound) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // In-place Fisher-Yates; consumes size()-1 generator calls.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace dupweight
