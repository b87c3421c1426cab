#include "guidepost/sketch/bundle.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "binary_io.hpp"
#include "guidepost/error.hpp"

namespace guidepost::sketch {

void SketchConfig::validate() const {
  if (k == 0 || k % 64 != 0) fail(ErrorCode::invalid_argument, "k must be a positive multiple of 64");
  if (!(epsilon > 0.0 && epsilon <= 0.1)) fail(ErrorCode::invalid_argument, "epsilon must be in (0, 0.1]");
  if (heavy_hitters == 0) fail(ErrorCode::invalid_argument, "heavy hitters capacity must be positive");
  if (reservoir == 0) fail(ErrorCode::invalid_argument, "reservoir capacity must be positive");
  if (cardinality_cap == 0) fail(ErrorCode::invalid_argument, "cardinality cap must be positive");
}

const ColumnSketch& SketchBundle::column(std::size_t index) const {
  if (index >= columns.size()) fail(ErrorCode::invalid_argument, "invalid column index " + std::to_string(index));
  return columns[index];
}

SketchBundle build_bundle(const Dataset& dataset, const SketchConfig& config, std::uint64_t first_row) {
  config.validate();
  SketchBundle bundle;
  bundle.config = config;
  bundle.fingerprint = dataset.id();
  bundle.rows = dataset.rows();
  bundle.columns.resize(dataset.cols());

  const std::size_t rows = dataset.rows();
  std::vector<std::size_t> projected;  // numeric columns that get a signature or projection

  for (const auto& meta : dataset.columns()) {
    auto& entry = bundle.columns[meta.index];
    entry.index = meta.index;
    entry.kind = meta.kind;
    if (meta.missing_count == rows) continue;  // absent

    if (meta.kind == ColumnKind::numeric) {
      const auto& col = dataset.numeric(meta.index);
      NumericSketches s{MomentSketch{}, QuantileSketch(config.epsilon),
                        ReservoirSample<double>(config.reservoir, config.seed)};
      std::unordered_set<double> distinct;
      bool over_cap = false;
      if (meta.integer_valued) s.frequencies.emplace(config.heavy_hitters);
      for (std::size_t r = 0; r < rows; ++r) {
        if (col.missing[r]) continue;
        const double v = col.values[r];
        s.moments.add(v);
        s.quantiles.insert(v);
        s.sample.offer(first_row + r, v);
        if (s.frequencies) {
          s.frequencies->insert(format_real(v == 0.0 ? 0.0 : v));
          if (!over_cap) {
            distinct.insert(v == 0.0 ? 0.0 : v);
            over_cap = distinct.size() > config.cardinality_cap;
          }
        }
      }
      s.quantiles.flush();
      if (s.frequencies && !over_cap) s.distinct = distinct.size();
      if (config.retain_projections) s.projection.emplace(config.k, config.seed);
      if (config.retain_projections || s.quantiles.min() < s.quantiles.max()) projected.push_back(meta.index);
      entry.data = std::move(s);
    } else {
      const auto& col = dataset.categorical(meta.index);
      CategoricalSketches s{HeavyHittersSketch(config.heavy_hitters),
                            ReservoirSample<std::string>(config.reservoir, config.seed), std::nullopt};
      for (std::size_t r = 0; r < rows; ++r) {
        const auto code = col.codes[r];
        if (code == CategoricalColumn::kMissing) continue;
        const auto& value = col.dictionary[static_cast<std::size_t>(code)];
        s.frequencies.insert(value);
        s.sample.offer(first_row + r, value);
      }
      if (col.dictionary.size() <= config.cardinality_cap) s.distinct = col.dictionary.size();
      entry.data = std::move(s);
    }
  }

  if (projected.empty()) return bundle;

  // Second pass: centred projections onto the shared hyperplanes.
  const std::uint32_t k = config.k;
  std::vector<double> means(projected.size());
  std::vector<bool> signed_column(projected.size());
  std::vector<const NumericColumn*> cols(projected.size());
  for (std::size_t p = 0; p < projected.size(); ++p) {
    auto& s = std::get<NumericSketches>(bundle.columns[projected[p]].data);
    means[p] = moments_to_metrics(s.moments).mean;
    signed_column[p] = s.quantiles.min() < s.quantiles.max();
    cols[p] = &dataset.numeric(projected[p]);
  }
  std::vector<double> acc(projected.size() * k, 0.0);
  std::vector<double> weights(k);
  for (std::size_t r = 0; r < rows; ++r) {
    hyperplane_weights(config.seed, first_row + r, weights);
    for (std::size_t p = 0; p < projected.size(); ++p) {
      if (cols[p]->missing[r]) continue;
      const double v = cols[p]->values[r];
      if (signed_column[p]) {
        const double d = v - means[p];
        double* a = acc.data() + p * k;
        for (std::uint32_t j = 0; j < k; ++j) a[j] += weights[j] * d;
      }
      if (config.retain_projections) {
        std::get<NumericSketches>(bundle.columns[projected[p]].data).projection->add_row_weights(weights, v);
      }
    }
  }
  for (std::size_t p = 0; p < projected.size(); ++p) {
    if (!signed_column[p]) continue;
    HyperplaneSketch sig{k, config.seed, std::vector<std::uint64_t>(k / 64, 0)};
    const double* a = acc.data() + p * k;
    for (std::uint32_t j = 0; j < k; ++j) {
      if (a[j] > 0.0) sig.bits[j / 64] |= std::uint64_t{1} << (j % 64);
    }
    std::get<NumericSketches>(bundle.columns[projected[p]].data).hyperplane = std::move(sig);
  }
  return bundle;
}

SketchBundle merge_bundles(const SketchBundle& a, const SketchBundle& b, std::string fingerprint) {
  if (!(a.config == b.config)) fail(ErrorCode::invalid_argument, "cannot merge bundles with different configs");
  if (a.columns.size() != b.columns.size()) fail(ErrorCode::invalid_argument, "cannot merge bundles with different schemas");
  SketchBundle out;
  out.config = a.config;
  out.fingerprint = std::move(fingerprint);
  out.rows = a.rows + b.rows;
  out.columns.resize(a.columns.size());
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    const auto& x = a.columns[c];
    const auto& y = b.columns[c];
    if (x.kind != y.kind) fail(ErrorCode::invalid_argument, "cannot merge bundles with different column kinds");
    auto& z = out.columns[c];
    z.index = c;
    z.kind = x.kind;
    if (x.absent()) {
      z.data = y.data;
      continue;
    }
    if (y.absent()) {
      z.data = x.data;
      continue;
    }
    if (const auto* xn = x.numeric()) {
      const auto& yn = *y.numeric();
      NumericSketches s = *xn;
      s.moments.merge(yn.moments);
      s.quantiles.merge(yn.quantiles);
      s.sample.merge(yn.sample);
      s.distinct.reset();
      if (s.frequencies && yn.frequencies) {
        s.frequencies->merge(*yn.frequencies);
      } else {
        s.frequencies.reset();
      }
      s.hyperplane.reset();
      if (s.projection && yn.projection) {
        s.projection->merge(*yn.projection);
        if (s.quantiles.min() < s.quantiles.max()) {
          s.hyperplane = s.projection->finalize(moments_to_metrics(s.moments).mean);
        }
      } else {
        s.projection.reset();
      }
      z.data = std::move(s);
    } else {
      const auto& xc = *x.categorical();
      const auto& yc = *y.categorical();
      CategoricalSketches s = xc;
      s.frequencies.merge(yc.frequencies);
      s.sample.merge(yc.sample);
      s.distinct.reset();
      z.data = std::move(s);
    }
  }
  return out;
}

// --- binary container ----------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "GPSKETCH";

enum ColumnFlags : std::uint8_t {
  kAbsent = 1 << 0,
  kHasHyperplane = 1 << 1,
  kHasProjection = 1 << 2,
  kHasFrequencies = 1 << 3,
  kHasDistinct = 1 << 4,
};

void write_sum(detail::ByteWriter& w, const ExactSum& s) {
  if (!s.finite()) {
    w.u8(0);
    w.u64(1);
    w.f64(s.value());
    return;
  }
  const auto c = s.canonical();
  w.u8(1);
  w.u64(c.parts().size());
  for (double p : c.parts()) w.f64(p);
}

ExactSum read_sum(detail::ByteReader& r) {
  const bool finite = r.u8() != 0;
  std::vector<double> parts(r.count(8));
  for (double& p : parts) p = r.f64();
  return ExactSum::from_parts(parts, finite);
}

void write_frequencies(detail::ByteWriter& w, const HeavyHittersSketch& h) {
  w.u64(h.capacity());
  w.u64(h.count());
  auto items = h.items();
  std::sort(items.begin(), items.end());
  w.u64(items.size());
  for (const auto& [value, c] : items) {
    w.str(value);
    w.u64(c);
  }
}

HeavyHittersSketch read_frequencies(detail::ByteReader& r) {
  const auto capacity = r.u64();
  const auto count = r.u64();
  std::vector<std::pair<std::string, std::uint64_t>> items(r.count(12));
  for (auto& [value, c] : items) {
    value = r.str();
    c = r.u64();
  }
  if (capacity == 0 || capacity > (std::uint64_t{1} << 32)) fail(ErrorCode::corrupt, "bad heavy hitters capacity");
  return HeavyHittersSketch::from_parts(capacity, count, std::move(items));
}

template <class T, class WriteValue>
void write_sample(detail::ByteWriter& w, const ReservoirSample<T>& s, WriteValue write_value) {
  w.u64(s.capacity());
  w.u64(s.seed());
  w.u64(s.seen());
  auto entries = s.entries();
  w.u64(entries.size());
  for (const auto& e : entries) {
    w.u64(e.row);
    write_value(e.value);
  }
}

template <class T, class ReadValue>
ReservoirSample<T> read_sample(detail::ByteReader& r, ReadValue read_value) {
  const auto capacity = r.u64();
  const auto seed = r.u64();
  const auto seen = r.u64();
  std::vector<typename ReservoirSample<T>::Entry> entries(r.count(12));
  if (entries.size() > capacity || entries.size() > seen) fail(ErrorCode::corrupt, "reservoir larger than capacity");
  for (auto& e : entries) {
    e.row = r.u64();
    e.value = read_value();
  }
  return ReservoirSample<T>::from_parts(capacity, seed, seen, std::move(entries));
}

void write_column(detail::ByteWriter& w, const ColumnSketch& col) {
  w.u32(static_cast<std::uint32_t>(col.index));
  w.u8(col.kind == ColumnKind::numeric ? 0 : 1);
  std::uint8_t flags = 0;
  if (col.absent()) {
    w.u8(kAbsent);
    return;
  }
  if (const auto* n = col.numeric()) {
    if (n->hyperplane) flags |= kHasHyperplane;
    if (n->projection) flags |= kHasProjection;
    if (n->frequencies) flags |= kHasFrequencies;
    if (n->distinct) flags |= kHasDistinct;
    w.u8(flags);
    w.u64(n->moments.count());
    for (int p = 1; p <= 4; ++p) write_sum(w, n->moments.exact_power_sum(p));
    w.f64(n->quantiles.epsilon());
    w.u64(n->quantiles.count());
    const auto& tuples = n->quantiles.tuples();
    w.u64(tuples.size());
    for (const auto& t : tuples) {
      w.f64(t.value);
      w.u64(t.rmin);
      w.u64(t.rmax);
    }
    write_sample(w, n->sample, [&](double v) { w.f64(v); });
    if (n->hyperplane) {
      w.u32(n->hyperplane->k);
      w.u64(n->hyperplane->seed);
      for (auto word : n->hyperplane->bits) w.u64(word);
    }
    if (n->projection) {
      w.u32(n->projection->k());
      w.u64(n->projection->seed());
      for (double v : n->projection->weighted()) w.f64(v);
      for (double v : n->projection->weights()) w.f64(v);
    }
    if (n->frequencies) write_frequencies(w, *n->frequencies);
    if (n->distinct) w.u64(*n->distinct);
  } else {
    const auto& c = *col.categorical();
    if (c.distinct) flags |= kHasDistinct;
    w.u8(flags);
    write_frequencies(w, c.frequencies);
    write_sample(w, c.sample, [&](const std::string& v) { w.str(v); });
    if (c.distinct) w.u64(*c.distinct);
  }
}

ColumnSketch read_column(detail::ByteReader& r, const SketchConfig& config) {
  ColumnSketch col;
  col.index = r.u32();
  const auto kind = r.u8();
  if (kind > 1) fail(ErrorCode::corrupt, "unknown column kind in sketch bundle");
  col.kind = kind == 0 ? ColumnKind::numeric : ColumnKind::categorical;
  const auto flags = r.u8();
  if (flags & kAbsent) return col;
  if (col.kind == ColumnKind::numeric) {
    NumericSketches n{MomentSketch{}, QuantileSketch(config.epsilon), ReservoirSample<double>(config.reservoir, config.seed)};
    const auto count = r.u64();
    ExactSum sums[4];
    for (auto& s : sums) s = read_sum(r);
    n.moments = MomentSketch::from_parts(count, sums[0], sums[1], sums[2], sums[3]);
    const double eps = r.f64();
    if (!(eps > 0.0 && eps <= 0.1)) fail(ErrorCode::corrupt, "bad quantile epsilon");
    const auto qcount = r.u64();
    std::vector<QuantileSketch::Tuple> tuples(r.count(24));
    for (auto& t : tuples) {
      t.value = r.f64();
      t.rmin = r.u64();
      t.rmax = r.u64();
    }
    n.quantiles = QuantileSketch::from_parts(eps, qcount, std::move(tuples));
    n.sample = read_sample<double>(r, [&] { return r.f64(); });
    if (flags & kHasHyperplane) {
      HyperplaneSketch h;
      h.k = r.u32();
      h.seed = r.u64();
      if (h.k == 0 || h.k % 64 != 0 || h.k > (1u << 24)) fail(ErrorCode::corrupt, "bad hyperplane length");
      h.bits.resize(h.k / 64);
      for (auto& word : h.bits) word = r.u64();
      n.hyperplane = std::move(h);
    }
    if (flags & kHasProjection) {
      const auto k = r.u32();
      const auto seed = r.u64();
      if (k == 0 || k % 64 != 0 || k > (1u << 24)) fail(ErrorCode::corrupt, "bad projection length");
      std::vector<double> weighted(k), weights(k);
      for (double& v : weighted) v = r.f64();
      for (double& v : weights) v = r.f64();
      n.projection = HyperplaneAccumulator::from_parts(k, seed, std::move(weighted), std::move(weights));
    }
    if (flags & kHasFrequencies) n.frequencies = read_frequencies(r);
    if (flags & kHasDistinct) n.distinct = r.u64();
    col.data = std::move(n);
  } else {
    CategoricalSketches c{read_frequencies(r), ReservoirSample<std::string>(config.reservoir, config.seed), std::nullopt};
    c.sample = read_sample<std::string>(r, [&] { return r.str(); });
    if (flags & kHasDistinct) c.distinct = r.u64();
    col.data = std::move(c);
  }
  return col;
}

}  // namespace

std::string serialize(const SketchBundle& bundle) {
  detail::ByteWriter w;
  w.raw(kMagic);
  w.u32(kBundleFormatVersion);
  w.u32(bundle.config.k);
  w.u64(bundle.config.seed);
  w.f64(bundle.config.epsilon);
  w.u32(bundle.config.heavy_hitters);
  w.u32(bundle.config.reservoir);
  w.u32(bundle.config.cardinality_cap);
  w.u8(bundle.config.retain_projections ? 1 : 0);
  w.str(bundle.fingerprint);
  w.u64(bundle.rows);
  w.u32(static_cast<std::uint32_t>(bundle.columns.size()));
  for (const auto& col : bundle.columns) {
    detail::ByteWriter record;
    write_column(record, col);
    w.u32(static_cast<std::uint32_t>(record.size()));
    w.raw(record.bytes());
  }
  return std::move(w.bytes());
}

SketchBundle deserialize_bundle(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (r.take(kMagic.size()) != kMagic) fail(ErrorCode::corrupt, "not a sketch bundle (bad magic)");
  const auto version = r.u32();
  if (version != kBundleFormatVersion) {
    fail(ErrorCode::corrupt, "unsupported sketch bundle version " + std::to_string(version));
  }
  SketchBundle b;
  b.config.k = r.u32();
  b.config.seed = r.u64();
  b.config.epsilon = r.f64();
  b.config.heavy_hitters = r.u32();
  b.config.reservoir = r.u32();
  b.config.cardinality_cap = r.u32();
  b.config.retain_projections = r.u8() != 0;
  try {
    b.config.validate();
  } catch (const Error& e) {
    fail(ErrorCode::corrupt, std::string("bad bundle config: ") + e.what());
  }
  b.fingerprint = r.str();
  b.rows = r.u64();
  const auto ncols = r.u32();
  for (std::uint32_t c = 0; c < ncols; ++c) {
    const auto len = r.u32();
    detail::ByteReader record(r.take(len));
    try {
      b.columns.push_back(read_column(record, b.config));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::corrupt) throw;
      fail(ErrorCode::corrupt, std::string("bad column record: ") + e.what());
    }
    if (!record.done()) fail(ErrorCode::corrupt, "trailing bytes in column record");
    if (b.columns.back().index != c) fail(ErrorCode::corrupt, "column records out of order");
  }
  if (!r.done()) fail(ErrorCode::corrupt, "trailing bytes after sketch bundle");
  return b;
}

}  // namespace guidepost::sketch
