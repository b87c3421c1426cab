#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include <benchmark/benchmark.h>

#include "guidepost/dataset.hpp"
#include "guidepost/descriptors.hpp"
#include "guidepost/sketch/bundle.hpp"
#include "guidepost/sketch/estimators.hpp"
#include "guidepost/sketch/hyperplane.hpp"
#include "guidepost/sketch/quantile_sketch.hpp"

namespace {

using namespace guidepost;

struct Pair {
  std::vector<double> x, y;
};

Pair make_pair(std::size_t n, double rho = 0.6) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> normal;
  Pair p{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    p.x[i] = normal(rng);
    p.y[i] = rho * p.x[i] + std::sqrt(1 - rho * rho) * normal(rng);
  }
  return p;
}

void BM_ExactPearson(benchmark::State& state) {
  const auto p = make_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pearson(p.x, p.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExactPearson)->Arg(10'000)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMicrosecond);

void BM_ApproxPearson(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = make_pair(n);
  sketch::HyperplaneProjector proj(1024, 42, {0.0, 0.0});
  double row[2];
  for (std::size_t i = 0; i < n; ++i) {
    row[0] = p.x[i];
    row[1] = p.y[i];
    proj.add_row(i, row);
  }
  const auto hx = proj.signature(0);
  const auto hy = proj.signature(1);
  for (auto _ : state) benchmark::DoNotOptimize(sketch::approx_pearson(hx, hy));
}
BENCHMARK(BM_ApproxPearson)->Arg(10'000)->Arg(100'000)->Arg(1'000'000);

void BM_QuantileInsert(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> values(100'000);
  for (auto& v : values) v = normal(rng);
  for (auto _ : state) {
    sketch::QuantileSketch q(0.005);
    for (double v : values) q.insert(v);
    benchmark::DoNotOptimize(q.quantile(0.5));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(values.size()));
}
BENCHMARK(BM_QuantileInsert)->Unit(benchmark::kMillisecond);

void BM_BuildBundle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 8;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::vector<ColumnMeta> meta;
  std::vector<std::variant<NumericColumn, CategoricalColumn>> columns;
  for (std::size_t c = 0; c < d; ++c) {
    NumericColumn col;
    col.values.resize(n);
    col.missing.assign(n, 0);
    for (auto& v : col.values) v = normal(rng);
    ColumnMeta m;
    m.name = "c" + std::to_string(c);
    m.index = c;
    meta.push_back(m);
    columns.emplace_back(std::move(col));
  }
  const Dataset ds("00000000000000bb", n, std::move(meta), std::move(columns));
  for (auto _ : state) benchmark::DoNotOptimize(sketch::build_bundle(ds, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BuildBundle)->Arg(10'000)->Arg(50'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
