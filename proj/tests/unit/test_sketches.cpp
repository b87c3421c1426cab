#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include "datasets.hpp"
#include "guidepost/descriptors.hpp"
#include "guidepost/error.hpp"
#include "guidepost/sketch/estimators.hpp"
#include "guidepost/sketch/exact_sum.hpp"
#include "guidepost/sketch/heavy_hitters.hpp"
#include "guidepost/sketch/hyperplane.hpp"
#include "guidepost/sketch/moment_sketch.hpp"
#include "guidepost/sketch/quantile_sketch.hpp"
#include "guidepost/sketch/reservoir.hpp"
#include "reference.hpp"

using namespace guidepost;
using namespace guidepost::sketch;

namespace {

MomentSketch moments_of(const std::vector<double>& v, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  MomentSketch m;
  for (std::size_t i = from; i < std::min(to, v.size()); ++i) m.add(v[i]);
  return m;
}

QuantileSketch quantiles_of(const std::vector<double>& v, double eps) {
  QuantileSketch q(eps);
  for (double x : v) q.insert(x);
  return q;
}

// True when some position holding the returned value lies within eps*n of q*n.
bool rank_ok(const std::vector<double>& sorted, double value, double q, double eps) {
  const double n = static_cast<double>(sorted.size());
  const double lo = static_cast<double>(ref::count_below(sorted, value)) + 1;
  const double hi = static_cast<double>(ref::count_at_most(sorted, value));
  if (hi < lo) return false;  // value not in the data
  const double target_lo = (q - eps) * n;
  const double target_hi = (q + eps) * n;
  return hi >= target_lo - 1 && lo <= target_hi + 1;
}

HyperplaneSketch signature(const std::vector<double>& v, std::uint32_t k = 1024, std::uint64_t seed = 42) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return hyperplane_signature(v, mean, k, seed);
}

}  // namespace

TEST_SUITE("sketches") {
  TEST_CASE("exact sums are exact") {
    ExactSum s;
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 1.0);
    ExactSum t;
    for (int i = 0; i < 10; ++i) t.add(0.1);
    CHECK(t.value() == 1.0);  // correctly rounded sum of ten copies of double(0.1)
    CHECK((ExactSum(3.0) * ExactSum(1.0 / 3.0)).value() == 1.0);
  }

  TEST_CASE("moment sketch metrics") {
    auto m = moments_to_metrics(moments_of({-1, 1, -1, 1}));
    CHECK(m.mean == 0.0);
    CHECK(m.stddev == 1.0);
    CHECK(*m.skewness == 0.0);
    CHECK(*m.kurtosis == 1.0);
    auto c = moments_to_metrics(moments_of({5, 5, 5}));
    CHECK(c.stddev == 0.0);
    CHECK_FALSE(c.skewness.has_value());

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit;
    for (int t = 0; t < 30; ++t) {
      auto v = testdata::normal_column(rng, 1000 + rng() % 20000, 1e6 * (unit(rng) - 0.5), 1 + 1e3 * unit(rng));
      if (t % 2) {
        for (auto& x : v) x = std::clamp(x * std::fabs(x) / 1e6, -1e6, 1e6);
      }
      auto mm = moments_to_metrics(moments_of(v));
      CHECK(ref::close(*mm.skewness, *ref::skewness(v), 1e-6, 1e-9));
      CHECK(ref::close(*mm.kurtosis, *ref::kurtosis(v), 1e-6));
    }
  }

  TEST_CASE("moment sketch merge equals whole") {
    std::mt19937_64 rng(12);
    auto v = testdata::normal_column(rng, 5000, 10, 3);
    for (std::size_t cut : {0u, 1u, 2500u, 4999u}) {
      auto a = moments_of(v, 0, cut);
      a.merge(moments_of(v, cut));
      const auto whole = moments_of(v);
      CHECK(a == whole);
      for (int p = 1; p <= 4; ++p) CHECK(a.power_sum(p) == whole.power_sum(p));
    }
  }

  TEST_CASE("quantile sketch on 1..1000") {
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 1.0);
    std::mt19937_64 rng(1);
    std::shuffle(v.begin(), v.end(), rng);
    auto q = quantiles_of(v, 0.01);
    const double med = q.quantile(0.5);
    CHECK(med >= 490);
    CHECK(med <= 510);
    CHECK(q.quantile(0.0) == 1);
    CHECK(q.quantile(1.0) == 1000);
    CHECK(std::fabs(q.rank(1001) - 1000) <= 10);
    CHECK(q.count() == 1000);
    CHECK_THROWS_AS(QuantileSketch(0.01).quantile(0.5), Error);
  }

  TEST_CASE("quantile sketch adversarial streams") {
    const double eps = 0.005;
    std::mt19937_64 rng(2);
    const std::size_t n = 50000;
    std::vector<std::vector<double>> streams;
    std::vector<double> asc(n), desc(n), dup(n), zigzag(n), few(n);
    for (std::size_t i = 0; i < n; ++i) {
      asc[i] = static_cast<double>(i);
      desc[i] = static_cast<double>(n - i);
      dup[i] = static_cast<double>(i / 1000);
      zigzag[i] = i % 2 ? static_cast<double>(i) : -static_cast<double>(i);
      few[i] = static_cast<double>(rng() % 3);
    }
    for (auto* s : {&asc, &desc, &dup, &zigzag, &few}) {
      auto q = quantiles_of(*s, eps);
      auto sorted = *s;
      std::sort(sorted.begin(), sorted.end());
      for (double p = 0.0; p <= 1.0; p += 0.01) CHECK(rank_ok(sorted, q.quantile(p), p, eps));
      CHECK(q.quantile(0) == sorted.front());
      CHECK(q.quantile(1) == sorted.back());
      for (int t = 0; t < 50; ++t) {
        const double probe = sorted[rng() % n] + 0.5;
        CHECK(std::fabs(q.rank(probe) - static_cast<double>(ref::count_at_most(sorted, probe))) <= eps * n + 1);
      }
      CHECK(q.size() < n / 10);
    }
  }

  TEST_CASE("quantile sketch merge keeps the rank bound") {
    const double eps = 0.005;
    std::mt19937_64 rng(3);
    std::vector<double> all;
    QuantileSketch merged(eps);
    for (int part = 0; part < 8; ++part) {
      auto v = testdata::normal_column(rng, 3000 + rng() % 7000, part, 1 + part);
      merged.merge(quantiles_of(v, eps));
      all.insert(all.end(), v.begin(), v.end());
    }
    std::sort(all.begin(), all.end());
    CHECK(merged.count() == all.size());
    for (double p = 0.0; p <= 1.0; p += 0.02) CHECK(rank_ok(all, merged.quantile(p), p, eps));
    CHECK(merged.min() == all.front());
    CHECK(merged.max() == all.back());
  }

  TEST_CASE("heavy hitters bounds") {
    std::mt19937_64 rng(4);
    auto labels = testdata::zipf_labels(rng, 100000, 5000, 1.2);
    HeavyHittersSketch hh(64);
    std::map<std::string, std::uint64_t> exact;
    for (const auto& l : labels) {
      hh.insert(l);
      ++exact[l];
    }
    const double n = static_cast<double>(labels.size());
    CHECK(hh.count() == labels.size());
    for (const auto& [value, c] : exact) {
      const auto est = hh.estimate(value);
      CHECK(est <= c);
      CHECK(static_cast<double>(est) >= static_cast<double>(c) - n / 64);
      if (static_cast<double>(c) > n / 64) CHECK(hh.contains(value));
    }
    CHECK(hh.items().size() <= 64);

    // Merge of two halves obeys the same bounds.
    HeavyHittersSketch a(64), b(64);
    for (std::size_t i = 0; i < labels.size(); ++i) (i % 2 ? a : b).insert(labels[i]);
    a.merge(b);
    CHECK(a.count() == labels.size());
    for (const auto& [value, c] : exact) {
      CHECK(a.estimate(value) <= c);
      CHECK(static_cast<double>(a.estimate(value)) >= static_cast<double>(c) - n / 64);
    }
  }

  TEST_CASE("reservoir sample") {
    ReservoirSample<double> r(100, 42);
    for (std::uint64_t i = 0; i < 10000; ++i) r.offer(i, static_cast<double>(i));
    CHECK(r.size() == 100);
    CHECK(r.seen() == 10000);
    auto entries = r.entries();
    CHECK(std::is_sorted(entries.begin(), entries.end(), [](auto& a, auto& b) { return a.row < b.row; }));
    for (const auto& e : entries) CHECK(e.value == static_cast<double>(e.row));

    // Same rows kept across columns sharing the seed.
    ReservoirSample<std::string> s(100, 42);
    for (std::uint64_t i = 0; i < 10000; ++i) s.offer(i, std::to_string(i));
    auto se = s.entries();
    for (std::size_t i = 0; i < se.size(); ++i) CHECK(se[i].row == entries[i].row);

    // Merge of a row partition equals the whole.
    ReservoirSample<double> p1(100, 42), p2(100, 42);
    for (std::uint64_t i = 0; i < 10000; ++i) (i < 3000 ? p1 : p2).offer(i, static_cast<double>(i));
    p1.merge(p2);
    CHECK(p1.seen() == 10000);
    auto pe = p1.entries();
    REQUIRE(pe.size() == entries.size());
    for (std::size_t i = 0; i < pe.size(); ++i) CHECK(pe[i].row == entries[i].row);

    ReservoirSample<double> other(100, 7);
    CHECK_THROWS_AS(p1.merge(other), Error);
  }

  TEST_CASE("hyperplane signatures") {
    std::mt19937_64 rng(5);
    auto x = testdata::normal_column(rng, 2000);
    std::vector<double> neg(x.size()), shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      neg[i] = -x[i];
      shifted[i] = 3 * x[i] + 7;
    }
    const auto sx = signature(x);
    CHECK(sx.bits.size() == 16);
    CHECK(approx_pearson(sx, signature(x)).raw == 1.0);
    CHECK(approx_pearson(sx, signature(shifted)).raw == 1.0);
    CHECK(hamming_distance(sx, signature(neg)) == 1024);
    CHECK(approx_pearson(sx, signature(neg)).raw == -1.0);
    CHECK(approx_pearson(sx, signature(neg)).approximate);

    CHECK_THROWS_AS(hamming_distance(sx, signature(x, 512)), Error);
    try {
      hamming_distance(sx, signature(x, 1024, 7));
      FAIL("expected incomparable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::incomparable);
      CHECK(std::string(e.what()) == "incomparable sketches");
    }

    // Weights depend only on (seed, row); a projector matches the one-column path.
    std::vector<double> w1(64), w2(64);
    hyperplane_weights(42, 17, w1);
    hyperplane_weights(42, 17, w2);
    CHECK(w1 == w2);
    hyperplane_weights(42, 18, w2);
    CHECK(w1 != w2);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    HyperplaneProjector proj(1024, 42, {mean});
    for (std::size_t i = 0; i < x.size(); ++i) proj.add_row(i, std::span<const double>(&x[i], 1));
    CHECK(proj.signature(0) == sx);
  }

  TEST_CASE("hyperplane accuracy at population correlation 0.8") {
    std::mt19937_64 rng(6);
    int within = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
      auto [x, y] = testdata::correlated_pair(rng, 10000, 0.8);
      const std::uint64_t seed = 1000 + t;
      const double est = approx_pearson(signature(x, 1024, seed), signature(y, 1024, seed)).raw;
      within += std::fabs(est - *ref::pearson(x, y)) <= 0.075 ? 1 : 0;
    }
    CHECK(within >= trials - 1);
  }

  TEST_CASE("hyperplane accumulators merge across row partitions") {
    std::mt19937_64 rng(7);
    auto x = testdata::normal_column(rng, 3000, 5, 2);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    HyperplaneAccumulator a(256, 42), b(256, 42), whole(256, 42);
    for (std::size_t i = 0; i < x.size(); ++i) {
      (i < 1200 ? a : b).add(i, x[i]);
      whole.add(i, x[i]);
    }
    a.merge(b);
    const auto merged = a.finalize(mean);
    const auto direct = hyperplane_signature(x, mean, 256, 42);
    CHECK(hamming_distance(merged, direct) <= 2);
    CHECK(whole.finalize(mean) == merged);
    HyperplaneAccumulator other(256, 43);
    CHECK_THROWS_AS(a.merge(other), Error);
  }

  TEST_CASE("outlier count estimate") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit;
    std::vector<double> uniform(20000);
    for (auto& v : uniform) v = unit(rng);
    const double eps = 0.005;
    auto u = estimate_outlier_count(quantiles_of(uniform, eps));
    CHECK(u.strength <= 4 * eps * 20000);
    CHECK(u.approximate);

    // [1,2,3,4,100]-shaped data at n = 1e5 with 1% planted extremes.
    const std::size_t n = 100000;
    std::vector<double> planted(n);
    for (std::size_t i = 0; i < n; ++i) planted[i] = 1 + 3 * unit(rng);
    for (std::size_t i = 0; i < n / 100; ++i) planted[rng() % n] = 100 + unit(rng);
    const double exact = static_cast<double>(ref::tukey_count(planted));
    auto est = estimate_outlier_count(quantiles_of(planted, 0.001));
    CHECK(std::fabs(est.strength - exact) <= 0.004 * n);

    std::vector<double> constant(1000, 4.0);
    CHECK(estimate_outlier_count(quantiles_of(constant, eps)).strength == 0.0);
  }

  TEST_CASE("entropy estimate") {
    SUBCASE("uniform over four values") {
      std::vector<std::string> v;
      HeavyHittersSketch hh(8);
      for (int i = 0; i < 400; ++i) {
        v.push_back(std::string(1, static_cast<char>('a' + i % 4)));
        hh.insert(v.back());
      }
      auto e = estimate_entropy(hh, v, 400, 4);
      REQUIRE(e.admitted());
      CHECK(e.value->strength == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("two values at 0.9 and 0.1") {
      HeavyHittersSketch hh(256);
      std::vector<std::string> v;
      for (int i = 0; i < 1000; ++i) {
        v.push_back(i % 10 == 0 ? "rare" : "common");
        hh.insert(v.back());
      }
      auto e = estimate_entropy(hh, v, 1000, 2);
      REQUIRE(e.admitted());
      CHECK(e.value->raw == doctest::Approx(0.46899559358928117).epsilon(1e-12));
    }
    SUBCASE("zipf over ten thousand values") {
      std::mt19937_64 rng(9);
      const std::size_t n = 200000;
      auto labels = testdata::zipf_labels(rng, n, 10000, 1.1);
      HeavyHittersSketch hh(256);
      ReservoirSample<std::string> r(4096, 42);
      std::map<std::string, std::uint64_t> exact;
      for (std::size_t i = 0; i < n; ++i) {
        hh.insert(labels[i]);
        r.offer(i, labels[i]);
        ++exact[labels[i]];
      }
      std::vector<std::string> sample;
      for (auto& e : r.entries()) sample.push_back(e.value);
      auto e = estimate_entropy(hh, sample, n, exact.size());
      REQUIRE(e.admitted());
      CHECK(std::fabs(e.value->raw - *ref::normalized_entropy(exact)) <= 0.05);
    }
    SUBCASE("single category") {
      HeavyHittersSketch hh(4);
      hh.insert("x");
      CHECK_FALSE(estimate_entropy(hh, {}, 1, 1).admitted());
    }
  }
}
