#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace guidepost::sketch {

/// k-bit sign signature of a mean-centred column against k shared Gaussian
/// hyperplanes: bit j = [Σ_i g(j,i) (b_i - mean) > 0]. The Hamming distance H
/// between two signatures estimates the angle between the centred columns,
/// so cos(pi H / k) estimates their Pearson correlation.
struct HyperplaneSketch {
  std::uint32_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> bits;  // k / 64 words, bit j in word j / 64

  bool comparable(const HyperplaneSketch& other) const noexcept {
    return k == other.k && seed == other.seed;
  }
  friend bool operator==(const HyperplaneSketch&, const HyperplaneSketch&) = default;
};

/// Number of differing bits. Throws `incomparable` on (k, seed) mismatch.
std::uint32_t hamming_distance(const HyperplaneSketch& a, const HyperplaneSketch& b);

/// Gaussian weights g(j, row) for j in [0, out.size()). Generated from a
/// counter-based stream keyed by (seed, row): no weight matrix is stored and
/// every column sees the same hyperplanes.
void hyperplane_weights(std::uint64_t seed, std::uint64_t row, std::span<double> out);

/// Projections of several columns onto the shared hyperplanes, accumulated
/// row by row. Missing cells (NaN) contribute nothing.
class HyperplaneProjector {
 public:
  HyperplaneProjector(std::uint32_t k, std::uint64_t seed, std::vector<double> means);

  /// `cells[c]` is column c's value in this row (NaN when missing).
  void add_row(std::uint64_t row, std::span<const double> cells);
  HyperplaneSketch signature(std::size_t column) const;
  std::uint32_t k() const noexcept { return k_; }

 private:
  std::uint32_t k_;
  std::uint64_t seed_;
  std::vector<double> means_;
  std::vector<double> weights_;
  std::vector<double> acc_;  // column-major, k per column
};

/// Convenience for one column: rows are positions 0..n-1 offset by `first_row`.
HyperplaneSketch hyperplane_signature(std::span<const double> values, double mean, std::uint32_t k,
                                      std::uint64_t seed, std::uint64_t first_row = 0);

/// Mergeable projection state for partitioned builds. Keeps Σ g·b and Σ g
/// (over present cells) per hyperplane so the centring mean can be applied
/// after partitions are combined.
class HyperplaneAccumulator {
 public:
  HyperplaneAccumulator() = default;
  HyperplaneAccumulator(std::uint32_t k, std::uint64_t seed);

  void add(std::uint64_t row, double value);
  void add_row_weights(std::span<const double> weights, double value);
  void merge(const HyperplaneAccumulator& other);
  HyperplaneSketch finalize(double mean) const;

  std::uint32_t k() const noexcept { return k_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<double>& weighted() const noexcept { return weighted_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  static HyperplaneAccumulator from_parts(std::uint32_t k, std::uint64_t seed, std::vector<double> weighted,
                                          std::vector<double> weights);

 private:
  std::uint32_t k_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> weighted_;  // Σ g(j,i) b_i
  std::vector<double> weights_;   // Σ g(j,i)
  std::vector<double> scratch_;
};

}  // namespace guidepost::sketch
