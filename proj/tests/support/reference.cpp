#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ref {

bool close(double a, double b, double rel, double abs) {
  if (std::isnan(a) || std::isnan(b)) return false;
  return std::fabs(a - b) <= rel * std::fabs(b) + abs;
}

double quantile7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const long double h = static_cast<long double>(v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  const long double frac = h - lo;
  return static_cast<double>(v[lo] + frac * (static_cast<long double>(v[lo + 1]) - v[lo]));
}

std::optional<double> qcd(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  const long double q1 = quantile7(v, 0.25);
  const long double q3 = quantile7(v, 0.75);
  if (q1 + q3 == 0) return std::nullopt;
  return static_cast<double>((q3 - q1) / (q3 + q1));
}

namespace {

struct Central {
  long double m2, m3, m4;
};

std::optional<Central> central(const std::vector<double>& v) {
  if (v.size() < 2) return std::nullopt;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) return std::nullopt;
  long double mu = 0;
  for (double x : v) mu += x;
  mu /= v.size();
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    const long double d = x - mu;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  return Central{m2 / v.size(), m3 / v.size(), m4 / v.size()};
}

}  // namespace

std::optional<double> skewness(const std::vector<double>& v) {
  auto c = central(v);
  if (!c) return std::nullopt;
  return static_cast<double>(c->m3 / std::pow(c->m2, 1.5L));
}

std::optional<double> kurtosis(const std::vector<double>& v) {
  auto c = central(v);
  if (!c) return std::nullopt;
  return static_cast<double>(c->m4 / (c->m2 * c->m2));
}

std::uint64_t tukey_count(const std::vector<double>& v) {
  const double q1 = quantile7(v, 0.25);
  const double q3 = quantile7(v, 0.75);
  const double lo = q1 - 1.5 * (q3 - q1);
  const double hi = q3 + 1.5 * (q3 - q1);
  std::uint64_t n = 0;
  for (double x : v) n += (x < lo || x > hi) ? 1 : 0;
  return n;
}

std::optional<double> normalized_entropy(const std::map<std::string, std::uint64_t>& counts) {
  long double total = 0;
  std::size_t k = 0;
  for (const auto& [value, c] : counts) {
    total += c;
    k += c > 0 ? 1 : 0;
  }
  if (k <= 1) return std::nullopt;
  long double h = 0;
  for (const auto& [value, c] : counts) {
    if (c == 0) continue;
    const long double p = c / total;
    h -= p * std::log(p);
  }
  return static_cast<double>(h / std::log(static_cast<long double>(k)));
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) return std::nullopt;
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double correlation_p_value(double r, std::size_t n) {
  const long double ar = std::fabs(r);
  if (ar >= 1) return 0.0;
  const long double df = static_cast<long double>(n - 2);
  const long double t = ar * std::sqrt(df / (1 - ar * ar));
  const long double norm = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                           std::sqrt(df * std::numbers::pi_v<long double>);
  auto density = [&](long double u) { return norm * std::pow(1 + u * u / df, -(df + 1) / 2); };
  // P(|T| <= t) = 2 * integral_0^t density; Simpson with many panels.
  const int panels = 200000;
  const long double h = t / panels;
  long double s = density(0) + density(t);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4 : 2) * density(i * h);
  const long double inner = 2 * s * h / 3;
  return static_cast<double>(std::clamp<long double>(1 - inner, 0, 1));
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  long double concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0 && db == 0) continue;
      if (da == 0) {
        ++ties_a;
      } else if (db == 0) {
        ++ties_b;
      } else if ((da > 0) == (db > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long double denom = std::sqrt((concordant + discordant + ties_a) * (concordant + discordant + ties_b));
  return denom == 0 ? 0.0 : static_cast<double>((concordant - discordant) / denom);
}

std::uint64_t count_below(const std::vector<double>& sorted, double x) {
  return static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

std::uint64_t count_at_most(const std::vector<double>& sorted, double x) {
  return static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

}  // namespace ref
