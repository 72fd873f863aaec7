#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace revpref {

/// Counter-based pseudo-random generator (splitmix64 finalizer over a keyed
/// counter). The i-th output of a stream depends only on (key, i), so streams
/// with distinct keys can be drawn from in any order, on any thread, and still
/// reproduce the same sequences. All arithmetic is plain 64-bit, so output is
/// identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  Rng(std::uint64_t seed, std::string_view substream_label)
      : key_(derive_key(seed, substream_label)) {}

  /// Key for a named substream of a master seed (e.g. one per consumer label).
  static std::uint64_t derive_key(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : label) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return mix(seed ^ mix(h));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double next_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Fisher-Yates; self-contained so shuffles are reproducible everywhere.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace revpref
