#pragma once

#include <cstdint>
#include <string_view>

namespace matder {

/// splitmix64. Used everywhere randomness is needed so that runs are
/// reproducible bit-for-bit across platforms (no std::*_distribution).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform-enough draw in [0, n). n >= 1.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Draw in [lo, hi], inclusive. lo <= hi.
  std::int64_t in_range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

/// Derive an independent stream seed from a base seed and a purpose tag
/// (FNV-1a over the tag, mixed into the base).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return base ^ (h + 0x9e3779b97f4a7c15ULL + (base << 6) + (base >> 2));
}

}  // namespace matder
