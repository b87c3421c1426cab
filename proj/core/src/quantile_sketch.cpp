#include "guidepost/sketch/quantile_sketch.hpp"

#include <algorithm>
#include <cmath>

#include "guidepost/error.hpp"

namespace guidepost::sketch {

QuantileSketch::QuantileSketch(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.1)) {
    fail(ErrorCode::invalid_argument, "quantile sketch epsilon must be in (0, 0.1]");
  }
  batch_ = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(1.0 / epsilon)));
  buffer_.reserve(batch_);
}

void QuantileSketch::insert(double value) {
  buffer_.push_back(value);
  if (buffer_.size() >= batch_) flush();
}

void QuantileSketch::flush() {
  if (buffer_.empty()) return;
  std::sort(buffer_.begin(), buffer_.end());
  std::vector<Tuple> run;
  run.reserve(buffer_.size());
  for (std::size_t i = 0; i < buffer_.size(); ++i) run.push_back({buffer_[i], i + 1, i + 1});
  const auto count = buffer_.size();
  buffer_.clear();
  absorb(run, count);
}

void QuantileSketch::merge(const QuantileSketch& other) {
  flush();
  epsilon_ = std::max(epsilon_, other.epsilon_);
  if (other.buffer_.empty()) {
    absorb(other.tuples_, other.summarized_);
  } else {
    QuantileSketch copy = other;
    copy.flush();
    absorb(copy.tuples_, copy.summarized_);
  }
}

// Merge another summary into this one. For a tuple of one side, the other
// side contributes:
//   lower bound: rmin of its last tuple ordered before it,
//   upper bound: rmax - 1 of its first tuple ordered after it (or its n).
// Ties order this summary's tuples first.
void QuantileSketch::absorb(const std::vector<Tuple>& other, std::uint64_t other_count) {
  if (other.empty()) return;
  if (tuples_.empty()) {
    tuples_ = other;
    summarized_ = other_count;
    compress();
    return;
  }
  const auto& mine = tuples_;
  const std::uint64_t mine_count = summarized_;
  std::vector<Tuple> out;
  out.reserve(mine.size() + other.size());
  std::size_t i = 0, j = 0;
  while (i < mine.size() || j < other.size()) {
    const bool take_mine = j == other.size() || (i < mine.size() && mine[i].value <= other[j].value);
    if (take_mine) {
      // j = number of other tuples strictly below mine[i]
      const auto& t = mine[i];
      const std::uint64_t lo = j > 0 ? other[j - 1].rmin : 0;
      const std::uint64_t hi = j < other.size() ? other[j].rmax - 1 : other_count;
      out.push_back({t.value, t.rmin + lo, t.rmax + hi});
      ++i;
    } else {
      // i = number of my tuples <= other[j]
      const auto& t = other[j];
      const std::uint64_t lo = i > 0 ? mine[i - 1].rmin : 0;
      const std::uint64_t hi = i < mine.size() ? mine[i].rmax - 1 : mine_count;
      out.push_back({t.value, t.rmin + lo, t.rmax + hi});
      ++j;
    }
  }
  tuples_ = std::move(out);
  summarized_ = mine_count + other_count;
  compress();
}

// Drop interior tuples while every consecutive pair still satisfies
// rmax[next] - rmin[prev] <= 2 epsilon n. The extremes are always kept.
void QuantileSketch::compress() {
  if (tuples_.size() <= 2) return;
  const double limit = 2.0 * epsilon_ * static_cast<double>(summarized_);
  std::vector<Tuple> out;
  out.reserve(tuples_.size());
  out.push_back(tuples_.front());
  for (std::size_t i = 1; i + 1 < tuples_.size(); ++i) {
    const auto& next = tuples_[i + 1];
    if (static_cast<double>(next.rmax - out.back().rmin) <= limit) continue;
    out.push_back(tuples_[i]);
  }
  out.push_back(tuples_.back());
  tuples_ = std::move(out);
}

template <class F>
auto QuantileSketch::with_summary(F&& f) const {
  if (count() == 0) fail(ErrorCode::invalid_argument, "empty quantile sketch");
  if (buffer_.empty()) return f(tuples_, summarized_);
  QuantileSketch copy = *this;
  copy.flush();
  return f(copy.tuples_, copy.summarized_);
}

const std::vector<QuantileSketch::Tuple>& QuantileSketch::tuples() const {
  if (!buffer_.empty()) fail(ErrorCode::internal, "quantile sketch has unflushed inserts");
  return tuples_;
}

double QuantileSketch::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::invalid_argument, "quantile q must be in [0, 1]");
  return with_summary([q](const std::vector<Tuple>& t, std::uint64_t n) {
    if (q == 0.0) return t.front().value;
    if (q == 1.0) return t.back().value;
    const double target = std::clamp(q * static_cast<double>(n), 1.0, static_cast<double>(n));
    // Tuple whose rank interval is closest to the target on both sides.
    double best_err = INFINITY;
    double best = t.front().value;
    for (const auto& tuple : t) {
      const double err = std::max(target - static_cast<double>(tuple.rmin),
                                  static_cast<double>(tuple.rmax) - target);
      if (err < best_err) {
        best_err = err;
        best = tuple.value;
      }
      if (static_cast<double>(tuple.rmin) > target) break;
    }
    return best;
  });
}

namespace {

// Midpoint of [rmin of last tuple in the prefix, rmax - 1 of the first tuple
// after it]; the prefix is tuples for which `in_prefix(value)` holds.
template <class Pred>
double bounded_rank(const std::vector<QuantileSketch::Tuple>& t, std::uint64_t n, Pred in_prefix) {
  auto first_out = std::partition_point(t.begin(), t.end(),
                                        [&](const QuantileSketch::Tuple& x) { return in_prefix(x.value); });
  const double lo = first_out == t.begin() ? 0.0 : static_cast<double>(std::prev(first_out)->rmin);
  const double hi = first_out == t.end() ? static_cast<double>(n) : static_cast<double>(first_out->rmax - 1);
  return 0.5 * (lo + hi);
}

}  // namespace

double QuantileSketch::rank(double v) const {
  return with_summary([v](const std::vector<Tuple>& t, std::uint64_t n) {
    return bounded_rank(t, n, [v](double x) { return x <= v; });
  });
}

double QuantileSketch::rank_below(double v) const {
  return with_summary([v](const std::vector<Tuple>& t, std::uint64_t n) {
    return bounded_rank(t, n, [v](double x) { return x < v; });
  });
}

QuantileSketch QuantileSketch::from_parts(double epsilon, std::uint64_t count, std::vector<Tuple> tuples) {
  QuantileSketch s(epsilon);
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    if (t.rmin == 0 || t.rmin > t.rmax || t.rmax > count || (i > 0 && tuples[i - 1].value > t.value)) {
      fail(ErrorCode::corrupt, "inconsistent quantile sketch tuples");
    }
  }
  if ((count == 0) != tuples.empty()) fail(ErrorCode::corrupt, "inconsistent quantile sketch count");
  s.summarized_ = count;
  s.tuples_ = std::move(tuples);
  return s;
}

}  // namespace guidepost::sketch
