#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace guidepost::sketch {

/// Misra-Gries frequent-items summary with `capacity` counters.
///
/// Reported counts never exceed the true count and undershoot it by at most
/// (n - Σcounters) / (capacity + 1) <= n / (capacity + 1). Every value with
/// true frequency above n / (capacity + 1) is present.
class HeavyHittersSketch {
 public:
  explicit HeavyHittersSketch(std::size_t capacity = 256);

  void insert(std::string_view value);
  void merge(const HeavyHittersSketch& other);

  std::size_t capacity() const noexcept { return capacity_; }
  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t estimate(std::string_view value) const;
  /// Bound on (true - estimate) for any value.
  std::uint64_t error_bound() const noexcept;
  /// Counters sorted by descending count, ties by value.
  std::vector<std::pair<std::string, std::uint64_t>> items() const;
  bool contains(std::string_view value) const;

  static HeavyHittersSketch from_parts(std::size_t capacity, std::uint64_t count,
                                       std::vector<std::pair<std::string, std::uint64_t>> counters);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::size_t capacity_;
  std::uint64_t count_ = 0;
  std::unordered_map<std::string, std::uint64_t, Hash, std::equal_to<>> counters_;
};

}  // namespace guidepost::sketch
