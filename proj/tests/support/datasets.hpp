#pragma once

// Builders for synthetic test data.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "guidepost/dataset.hpp"

namespace testdata {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// A named column; NaN cells and empty strings are written as missing.
struct Column {
  std::string name;
  std::variant<std::vector<double>, std::vector<std::string>> cells;
};

std::string to_csv(const std::vector<Column>& columns);
guidepost::Dataset make_dataset(const std::vector<Column>& columns);

/// Numeric-only dataset assembled in memory, skipping CSV parsing.
guidepost::Dataset numeric_dataset(std::vector<std::vector<double>> columns, std::string id = "00000000000000aa");

/// Correlated pair with population correlation rho.
std::pair<std::vector<double>, std::vector<double>> correlated_pair(std::mt19937_64& rng, std::size_t n, double rho);

std::vector<double> normal_column(std::mt19937_64& rng, std::size_t n, double mean = 0.0, double sd = 1.0);

/// Column built as rho * base + sqrt(1 - rho^2) * noise.
std::vector<double> correlated_with(std::mt19937_64& rng, const std::vector<double>& base, double rho);

/// Zipf(s) draws over values 1..m rendered as text labels "v<k>".
std::vector<std::string> zipf_labels(std::mt19937_64& rng, std::size_t n, std::size_t m, double s);

/// Random dataset for ranking checks: numeric columns of varied shape, a few
/// integer-valued and categorical columns, sprinkled missing cells.
std::vector<Column> random_columns(std::mt19937_64& rng, std::size_t d, std::size_t n);

/// Contents of a file under tests/fixtures.
std::string read_fixture_file(const std::string& name);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testdata
