#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "guidepost/dataset.hpp"
#include "guidepost/sketch/heavy_hitters.hpp"
#include "guidepost/sketch/hyperplane.hpp"
#include "guidepost/sketch/moment_sketch.hpp"
#include "guidepost/sketch/quantile_sketch.hpp"
#include "guidepost/sketch/reservoir.hpp"

namespace guidepost::sketch {

struct SketchConfig {
  std::uint32_t k = 1024;               // hyperplane bits, multiple of 64
  std::uint64_t seed = 42;
  double epsilon = 0.005;               // quantile rank error
  std::uint32_t heavy_hitters = 256;    // Misra-Gries counters
  std::uint32_t reservoir = 4096;       // sampled cells per column
  std::uint32_t cardinality_cap = 10000;
  /// Keep mergeable projection state so partition bundles can be combined.
  bool retain_projections = false;

  void validate() const;
  friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

struct NumericSketches {
  MomentSketch moments;
  QuantileSketch quantiles;
  ReservoirSample<double> sample;
  std::optional<HyperplaneSketch> hyperplane;        // absent for constant columns
  std::optional<HyperplaneAccumulator> projection;   // only with retain_projections
  std::optional<HeavyHittersSketch> frequencies;     // integer-valued columns only
  std::optional<std::uint64_t> distinct;             // exact when <= cardinality cap
};

struct CategoricalSketches {
  HeavyHittersSketch frequencies;
  ReservoirSample<std::string> sample;
  std::optional<std::uint64_t> distinct;
};

struct ColumnSketch {
  std::size_t index = 0;
  ColumnKind kind = ColumnKind::numeric;
  /// monostate marks an absent entry (a column with no present cells).
  std::variant<std::monostate, NumericSketches, CategoricalSketches> data;

  bool absent() const noexcept { return std::holds_alternative<std::monostate>(data); }
  const NumericSketches* numeric() const noexcept { return std::get_if<NumericSketches>(&data); }
  const CategoricalSketches* categorical() const noexcept { return std::get_if<CategoricalSketches>(&data); }
};

/// Per-column synopses of one dataset. Valid only for the dataset whose
/// fingerprint it carries.
struct SketchBundle {
  SketchConfig config;
  std::string fingerprint;
  std::uint64_t rows = 0;
  std::vector<ColumnSketch> columns;

  const ColumnSketch& column(std::size_t index) const;
};

/// Two passes per numeric column (moments, quantiles and sample; then the
/// centred hyperplane signature), one pass per categorical column. Rows are
/// numbered from `first_row` so partitions of a larger table can be merged.
SketchBundle build_bundle(const Dataset& dataset, const SketchConfig& config, std::uint64_t first_row = 0);

/// Combine bundles built over disjoint row partitions of the same schema.
/// Hyperplane signatures are recomputed only when both inputs retained
/// their projections.
SketchBundle merge_bundles(const SketchBundle& a, const SketchBundle& b, std::string fingerprint);

// Versioned little-endian container: "GPSKETCH" magic, u32 version, config,
// fingerprint, row count, then one length-prefixed record per column.
inline constexpr std::uint32_t kBundleFormatVersion = 1;
std::string serialize(const SketchBundle& bundle);
SketchBundle deserialize_bundle(std::string_view bytes);

}  // namespace guidepost::sketch
