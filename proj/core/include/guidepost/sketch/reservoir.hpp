#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "guidepost/error.hpp"
#include "guidepost/hashing.hpp"

namespace guidepost::sketch {

/// Uniform without-replacement sample of up to `capacity` cells.
///
/// Implemented as bottom-k priority sampling: each row gets the key
/// sample_key(seed, row) and the sample holds the cells with the smallest
/// keys. Columns sketched with the same seed therefore sample the same rows
/// wherever both are present, and merging two samples of disjoint row sets
/// gives exactly the sample of the union.
template <class T>
class ReservoirSample {
 public:
  struct Entry {
    std::uint64_t row;
    T value;
  };

  ReservoirSample(std::size_t capacity = 4096, std::uint64_t seed = 0) : capacity_(capacity), seed_(seed) {}

  void offer(std::uint64_t row, T value) {
    ++seen_;
    if (capacity_ == 0) return;
    Slot slot{sample_key(seed_, row), row, std::move(value)};
    if (heap_.size() < capacity_) {
      heap_.push_back(std::move(slot));
      std::push_heap(heap_.begin(), heap_.end(), less);
    } else if (less(slot, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), less);
      heap_.back() = std::move(slot);
      std::push_heap(heap_.begin(), heap_.end(), less);
    }
  }

  void merge(const ReservoirSample& other) {
    if (other.seed_ != seed_ || other.capacity_ != capacity_) {
      fail(ErrorCode::invalid_argument, "reservoir samples differ in seed or capacity");
    }
    const auto seen = seen_ + other.seen_;
    for (const auto& s : other.heap_) {
      offer(s.row, s.value);
    }
    seen_ = seen;
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t seen() const noexcept { return seen_; }
  std::size_t size() const noexcept { return heap_.size(); }

  /// Sampled cells in ascending row order.
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(heap_.size());
    for (const auto& s : heap_) out.push_back(Entry{s.row, s.value});
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
    return out;
  }

  static ReservoirSample from_parts(std::size_t capacity, std::uint64_t seed, std::uint64_t seen,
                                    std::vector<Entry> entries) {
    ReservoirSample r(capacity, seed);
    for (auto& e : entries) r.offer(e.row, std::move(e.value));
    r.seen_ = seen;
    return r;
  }

 private:
  struct Slot {
    std::uint64_t key;
    std::uint64_t row;
    T value;
  };
  static bool less(const Slot& a, const Slot& b) { return std::tie(a.key, a.row) < std::tie(b.key, b.row); }

  std::size_t capacity_;
  std::uint64_t seed_;
  std::uint64_t seen_ = 0;
  std::vector<Slot> heap_;  // max-heap on (key, row)
};

}  // namespace guidepost::sketch
