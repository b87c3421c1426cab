#pragma once

#include <cstdint>
#include <vector>

namespace guidepost::sketch {

/// Deterministic mergeable quantile summary in the Greenwald-Khanna family.
///
/// Each stored tuple keeps a value together with lower/upper bounds on its
/// 1-based rank in the summarized stream. The summary maintains
///
///     rmax[i+1] - rmin[i] <= 2 * epsilon * n      for consecutive tuples,
///
/// which bounds every quantile and rank answer by epsilon * n. The first and
/// last tuples are the exact minimum and maximum. Inserts are buffered and
/// folded in as exact sorted runs through the same merge rule used for
/// combining two sketches.
class QuantileSketch {
 public:
  struct Tuple {
    double value;
    std::uint64_t rmin;
    std::uint64_t rmax;
  };

  explicit QuantileSketch(double epsilon = 0.005);

  void insert(double value);
  /// Union of two streams; the result has epsilon = max of the inputs.
  void merge(const QuantileSketch& other);
  /// Fold the insert buffer into the summary.
  void flush();

  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t count() const noexcept { return summarized_ + buffer_.size(); }
  bool empty() const noexcept { return count() == 0; }

  /// Value whose rank is within epsilon*n of q*n. q=0 and q=1 return the
  /// exact minimum and maximum.
  double quantile(double q) const;
  /// Estimated number of values <= v (within epsilon*n).
  double rank(double v) const;
  /// Estimated number of values < v (within epsilon*n).
  double rank_below(double v) const;

  double min() const { return quantile(0.0); }
  double max() const { return quantile(1.0); }

  /// Stored tuples; requires a flushed sketch.
  const std::vector<Tuple>& tuples() const;
  std::size_t size() const noexcept { return tuples_.size(); }

  static QuantileSketch from_parts(double epsilon, std::uint64_t count, std::vector<Tuple> tuples);

 private:
  void absorb(const std::vector<Tuple>& other, std::uint64_t other_count);
  void compress();
  template <class F>
  auto with_summary(F&& f) const;

  double epsilon_;
  std::uint64_t summarized_ = 0;
  std::vector<Tuple> tuples_;
  std::vector<double> buffer_;
  std::size_t batch_;
};

}  // namespace guidepost::sketch
