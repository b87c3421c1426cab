#include "guidepost/sketch/heavy_hitters.hpp"

#include <algorithm>

#include "guidepost/error.hpp"

namespace guidepost::sketch {

HeavyHittersSketch::HeavyHittersSketch(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) fail(ErrorCode::invalid_argument, "heavy hitters capacity must be positive");
  counters_.reserve(capacity + 1);
}

void HeavyHittersSketch::insert(std::string_view value) {
  ++count_;
  if (auto it = counters_.find(value); it != counters_.end()) {
    ++it->second;
    return;
  }
  if (counters_.size() < capacity_) {
    counters_.emplace(std::string(value), 1);
    return;
  }
  // Table full: the new value and every counter lose one occurrence.
  for (auto it = counters_.begin(); it != counters_.end();) {
    if (--it->second == 0) {
      it = counters_.erase(it);
    } else {
      ++it;
    }
  }
}

void HeavyHittersSketch::merge(const HeavyHittersSketch& other) {
  if (other.capacity_ != capacity_) fail(ErrorCode::invalid_argument, "heavy hitters capacities differ");
  count_ += other.count_;
  for (const auto& [value, c] : other.counters_) counters_[value] += c;
  if (counters_.size() <= capacity_) return;
  // Subtract the (capacity+1)-th largest count and drop what reaches zero.
  std::vector<std::uint64_t> counts;
  counts.reserve(counters_.size());
  for (const auto& kv : counters_) counts.push_back(kv.second);
  std::nth_element(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(capacity_), counts.end(),
                   std::greater<>());
  const std::uint64_t cut = counts[capacity_];
  for (auto it = counters_.begin(); it != counters_.end();) {
    if (it->second <= cut) {
      it = counters_.erase(it);
    } else {
      it->second -= cut;
      ++it;
    }
  }
}

std::uint64_t HeavyHittersSketch::estimate(std::string_view value) const {
  auto it = counters_.find(value);
  return it == counters_.end() ? 0 : it->second;
}

bool HeavyHittersSketch::contains(std::string_view value) const { return counters_.find(value) != counters_.end(); }

std::uint64_t HeavyHittersSketch::error_bound() const noexcept {
  std::uint64_t tracked = 0;
  for (const auto& kv : counters_) tracked += kv.second;
  return (count_ - tracked) / (capacity_ + 1);
}

std::vector<std::pair<std::string, std::uint64_t>> HeavyHittersSketch::items() const {
  std::vector<std::pair<std::string, std::uint64_t>> out(counters_.begin(), counters_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

HeavyHittersSketch HeavyHittersSketch::from_parts(std::size_t capacity, std::uint64_t count,
                                                  std::vector<std::pair<std::string, std::uint64_t>> counters) {
  HeavyHittersSketch s(capacity);
  if (counters.size() > capacity) fail(ErrorCode::corrupt, "heavy hitters table exceeds capacity");
  std::uint64_t tracked = 0;
  for (auto& [value, c] : counters) {
    if (c == 0) fail(ErrorCode::corrupt, "zero heavy hitters counter");
    tracked += c;
    if (!s.counters_.emplace(std::move(value), c).second) fail(ErrorCode::corrupt, "duplicate heavy hitter");
  }
  if (tracked > count) fail(ErrorCode::corrupt, "heavy hitters counters exceed stream length");
  s.count_ = count;
  return s;
}

}  // namespace guidepost::sketch
