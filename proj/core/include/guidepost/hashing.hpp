#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace guidepost {

// 64-bit FNV-1a. Used for content fingerprints and guidepost ids, so the
// output must never change between releases.
class Fnv1a64 {
 public:
  void update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  void update_u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      state_ ^= static_cast<unsigned char>(v >> (8 * i));
      state_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// SplitMix64 finalizer; a good stateless mixer for counter-based streams.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Minimal UniformRandomBitGenerator over a SplitMix64 counter.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

std::string to_hex(std::uint64_t v);

}  // namespace guidepost

namespace guidepost {

/// Per-row priority key shared by every sampler: the same (seed, row) always
/// maps to the same key, so samples of different columns line up by row.
constexpr std::uint64_t sample_key(std::uint64_t seed, std::uint64_t row) noexcept {
  return mix64(seed ^ mix64(row));
}

}  // namespace guidepost
