#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace guidepost {

enum class ColumnKind { numeric, categorical };

std::string_view to_string(ColumnKind kind);

struct ColumnMeta {
  std::size_t index = 0;
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::size_t missing_count = 0;
  /// Number of distinct non-missing values. Always filled for categorical
  /// columns; for numeric columns only when `integer_valued` is set.
  std::size_t distinct_count = 0;
  /// Numeric column whose non-missing cells are all integers. Such columns
  /// are also eligible for the heterogeneous-frequencies descriptor.
  bool integer_valued = false;
};

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
};

/// Numeric column storage. Missing cells hold NaN and are flagged in `missing`.
struct NumericColumn {
  std::vector<double> values;
  std::vector<std::uint8_t> missing;
};

/// Dictionary-encoded categorical column; code -1 marks a missing cell.
struct CategoricalColumn {
  static constexpr std::int32_t kMissing = -1;
  std::vector<std::string> dictionary;
  std::vector<std::int32_t> codes;
};

/// Immutable typed columnar table. Shared read-only once built.
class Dataset {
 public:
  Dataset(std::string id, std::size_t rows, std::vector<ColumnMeta> meta,
          std::vector<std::variant<NumericColumn, CategoricalColumn>> storage);

  const std::string& id() const noexcept { return id_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return meta_.size(); }
  const std::vector<ColumnMeta>& columns() const noexcept { return meta_; }
  const ColumnMeta& column(std::size_t index) const;

  const NumericColumn& numeric(std::size_t index) const;
  const CategoricalColumn& categorical(std::size_t index) const;

  /// Non-missing cells of a numeric column, in row order.
  std::vector<double> present_values(std::size_t index) const;

  /// Per-value occurrence counts for a categorical or integer-valued numeric
  /// column, keyed by the value's display text, sorted by text.
  std::vector<std::pair<std::string, std::uint64_t>> value_counts(std::size_t index) const;

  /// Text form of one cell, or nullopt when missing. Numeric cells use the
  /// shortest representation that round-trips to the stored double.
  std::optional<std::string> cell_text(std::size_t row, std::size_t col) const;

  std::optional<std::size_t> find_column(std::string_view name) const;

 private:
  std::string id_;
  std::size_t rows_;
  std::vector<ColumnMeta> meta_;
  std::vector<std::variant<NumericColumn, CategoricalColumn>> storage_;
};

/// Parse the whole stream into a Dataset. The dataset id is a fingerprint of
/// the raw bytes and the parse options.
Dataset ingest_csv(std::istream& source, const CsvOptions& options = {});
Dataset ingest_csv(std::string_view bytes, const CsvOptions& options = {});

/// Fingerprint used as dataset id.
std::string dataset_fingerprint(std::string_view bytes, const CsvOptions& options);

/// Missing-cell tokens: empty, "NA", "NaN" (case-insensitive, after trimming).
bool is_missing_token(std::string_view cell);

/// Finite real parse of a full (trimmed) cell.
std::optional<double> parse_real(std::string_view cell);

/// Numeric iff at least this share of non-missing cells parse as reals.
inline constexpr double kNumericParseThreshold = 0.95;

ColumnKind infer_column_kind(std::span<const std::string> cells);

std::string format_real(double v);

// --- raw row access ----------------------------------------------------------

enum class RowOp { eq, ne, lt, le, gt, ge, between, outside };

std::optional<RowOp> parse_row_op(std::string_view text);
std::string_view to_string(RowOp op);

struct RowFilter {
  std::size_t column = 0;
  RowOp op = RowOp::eq;
  /// Text operand; for numeric columns parsed as a real, for `between` and
  /// `outside` as "lo,hi". Categorical columns only accept eq / ne.
  std::string value;
};

struct RowPage {
  std::size_t total = 0;   // rows matching the filter, before paging
  std::size_t offset = 0;
  std::size_t limit = 0;
  std::vector<std::size_t> projection;
  std::vector<std::size_t> row_indices;
  std::vector<std::vector<std::optional<std::string>>> cells;
};

inline constexpr std::size_t kAllRows = std::numeric_limits<std::size_t>::max();

RowPage get_rows(const Dataset& dataset, const std::optional<RowFilter>& filter,
                 std::span<const std::size_t> projection, std::size_t limit,
                 std::size_t offset = 0);

}  // namespace guidepost
