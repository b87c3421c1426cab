#include "guidepost/sketch/hyperplane.hpp"

#include <bit>
#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "guidepost/error.hpp"
#include "guidepost/hashing.hpp"

namespace guidepost::sketch {

namespace {

void check_k(std::uint32_t k) {
  if (k == 0 || k % 64 != 0) fail(ErrorCode::invalid_argument, "hyperplane bit length must be a positive multiple of 64");
}

HyperplaneSketch signs_of(std::span<const double> projections, std::uint32_t k, std::uint64_t seed) {
  HyperplaneSketch s{k, seed, std::vector<std::uint64_t>(k / 64, 0)};
  for (std::uint32_t j = 0; j < k; ++j) {
    if (projections[j] > 0.0) s.bits[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  return s;
}

}  // namespace

std::uint32_t hamming_distance(const HyperplaneSketch& a, const HyperplaneSketch& b) {
  if (!a.comparable(b) || a.bits.size() != b.bits.size()) {
    fail(ErrorCode::incomparable, "incomparable sketches");
  }
  std::uint32_t h = 0;
  for (std::size_t w = 0; w < a.bits.size(); ++w) h += static_cast<std::uint32_t>(std::popcount(a.bits[w] ^ b.bits[w]));
  return h;
}

void hyperplane_weights(std::uint64_t seed, std::uint64_t row, std::span<double> out) {
  SplitMix64 rng(mix64(mix64(seed) + row));
  boost::random::normal_distribution<double> normal;
  for (double& g : out) g = normal(rng);
}

HyperplaneProjector::HyperplaneProjector(std::uint32_t k, std::uint64_t seed, std::vector<double> means)
    : k_(k), seed_(seed), means_(std::move(means)), weights_(k), acc_(static_cast<std::size_t>(k) * means_.size(), 0.0) {
  check_k(k);
}

void HyperplaneProjector::add_row(std::uint64_t row, std::span<const double> cells) {
  if (cells.size() != means_.size()) fail(ErrorCode::internal, "projector row width mismatch");
  hyperplane_weights(seed_, row, weights_);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (std::isnan(cells[c])) continue;
    const double d = cells[c] - means_[c];
    double* acc = acc_.data() + c * k_;
    for (std::uint32_t j = 0; j < k_; ++j) acc[j] += weights_[j] * d;
  }
}

HyperplaneSketch HyperplaneProjector::signature(std::size_t column) const {
  return signs_of(std::span<const double>(acc_).subspan(column * k_, k_), k_, seed_);
}

HyperplaneSketch hyperplane_signature(std::span<const double> values, double mean, std::uint32_t k,
                                      std::uint64_t seed, std::uint64_t first_row) {
  HyperplaneProjector p(k, seed, {mean});
  for (std::size_t i = 0; i < values.size(); ++i) p.add_row(first_row + i, values.subspan(i, 1));
  return p.signature(0);
}

HyperplaneAccumulator::HyperplaneAccumulator(std::uint32_t k, std::uint64_t seed)
    : k_(k), seed_(seed), weighted_(k, 0.0), weights_(k, 0.0) {
  check_k(k);
}

void HyperplaneAccumulator::add(std::uint64_t row, double value) {
  scratch_.resize(k_);
  hyperplane_weights(seed_, row, scratch_);
  add_row_weights(scratch_, value);
}

void HyperplaneAccumulator::add_row_weights(std::span<const double> weights, double value) {
  for (std::uint32_t j = 0; j < k_; ++j) {
    weighted_[j] += weights[j] * value;
    weights_[j] += weights[j];
  }
}

void HyperplaneAccumulator::merge(const HyperplaneAccumulator& other) {
  if (other.k_ != k_ || other.seed_ != seed_) fail(ErrorCode::incomparable, "incomparable sketches");
  for (std::uint32_t j = 0; j < k_; ++j) {
    weighted_[j] += other.weighted_[j];
    weights_[j] += other.weights_[j];
  }
}

HyperplaneSketch HyperplaneAccumulator::finalize(double mean) const {
  std::vector<double> centred(k_);
  for (std::uint32_t j = 0; j < k_; ++j) centred[j] = weighted_[j] - mean * weights_[j];
  return signs_of(centred, k_, seed_);
}

HyperplaneAccumulator HyperplaneAccumulator::from_parts(std::uint32_t k, std::uint64_t seed, std::vector<double> weighted,
                                                        std::vector<double> weights) {
  HyperplaneAccumulator a(k, seed);
  if (weighted.size() != k || weights.size() != k) fail(ErrorCode::corrupt, "projection state has wrong length");
  a.weighted_ = std::move(weighted);
  a.weights_ = std::move(weights);
  return a;
}

}  // namespace guidepost::sketch
