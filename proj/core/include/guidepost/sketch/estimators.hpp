#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "guidepost/descriptors.hpp"
#include "guidepost/sketch/heavy_hitters.hpp"
#include "guidepost/sketch/hyperplane.hpp"
#include "guidepost/sketch/quantile_sketch.hpp"

namespace guidepost::sketch {

/// Signed estimate cos(pi H / k); strength is its absolute value.
StrengthValue approx_pearson(const HyperplaneSketch& x, const HyperplaneSketch& y);

/// Quartile coefficient of dispersion from sketched quartiles.
Evaluation estimate_qcd(const QuantileSketch& sketch);

/// Tukey outlier count n - (rank(fence_high) - rank_below(fence_low)) from
/// sketched quartiles. Throws on an empty sketch.
StrengthValue estimate_outlier_count(const QuantileSketch& sketch);

/// Normalized entropy from a frequent-items summary plus a uniform sample.
///
/// Tracked values contribute their (lower-bound) frequencies directly. The
/// unaccounted mass R is distributed over sampled values that are not
/// tracked, with a Miller-Madow bias correction on the tail entropy (capped
/// at ln of the untracked distinct count); with no untracked sample it is
/// spread evenly over the untracked distinct values.
///
/// `sample` holds the sampled cells' value text; `distinct` is K.
Evaluation estimate_entropy(const HeavyHittersSketch& frequencies, std::span<const std::string> sample,
                            std::uint64_t n, std::uint64_t distinct);

}  // namespace guidepost::sketch
