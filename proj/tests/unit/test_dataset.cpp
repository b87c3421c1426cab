#include <doctest.h>

#include <random>
#include <sstream>

#include "datasets.hpp"
#include "guidepost/dataset.hpp"
#include "guidepost/error.hpp"

using namespace guidepost;
using testdata::read_fixture_file;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::internal;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("numeric and categorical typing") {
    auto ds = ingest_csv("a,b\n1,x\n2,y\n");
    CHECK(ds.rows() == 2);
    CHECK(ds.cols() == 2);
    CHECK(ds.column(0).kind == ColumnKind::numeric);
    CHECK(ds.column(1).kind == ColumnKind::categorical);
    CHECK(ds.column(1).distinct_count == 2);
  }

  TEST_CASE("zero data rows") {
    CHECK(code_of([] { ingest_csv(""); }) == ErrorCode::parse_error);
    CHECK(message_of([] { ingest_csv(""); }) == "zero data rows");
    CHECK(message_of([] { ingest_csv("a,b\n"); }) == "zero data rows");
  }

  TEST_CASE("inconsistent column counts") {
    CHECK(code_of([] { ingest_csv("a,b\n1,2\n3\n"); }) == ErrorCode::parse_error);
  }

  TEST_CASE("unreadable stream") {
    std::istringstream in("a\n1\n");
    in.setstate(std::ios::badbit);
    CHECK(code_of([&] { ingest_csv(in); }) == ErrorCode::parse_error);
  }

  TEST_CASE("twenty-five indicator columns") {
    auto ds = ingest_csv(read_fixture_file("oecd.csv"));
    CHECK(ds.cols() == 25);
    CHECK(ds.rows() >= 30);
  }

  TEST_CASE("infer_column_kind threshold") {
    const std::vector<std::string> numeric{"1.5", "2", "3"};
    const std::vector<std::string> cats{"a", "b", "b"};
    const std::vector<std::string> mostly{"1", "2", "x"};
    CHECK(infer_column_kind(numeric) == ColumnKind::numeric);
    CHECK(infer_column_kind(cats) == ColumnKind::categorical);
    CHECK(infer_column_kind(mostly) == ColumnKind::categorical);

    // 19 of 20 parse: exactly at the threshold.
    std::vector<std::string> at(19, "7");
    at.push_back("oops");
    CHECK(infer_column_kind(at) == ColumnKind::numeric);
    // 18 of 19 parse: below it.
    std::vector<std::string> below(18, "7");
    below.push_back("oops");
    CHECK(infer_column_kind(below) == ColumnKind::categorical);

    const std::vector<std::string> empty{"", "NA", " nan "};
    CHECK(code_of([&] { infer_column_kind(empty); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("missing tokens and effective counts") {
    auto ds = ingest_csv("a,b\n1,x\nNA,\n3,na\nnan,y\n");
    CHECK(ds.column(0).missing_count == 2);
    CHECK(ds.column(1).missing_count == 2);
    CHECK(ds.present_values(0) == std::vector<double>{1, 3});
    CHECK_FALSE(ds.cell_text(1, 0).has_value());
  }

  TEST_CASE("unparseable cells in a numeric column become missing") {
    std::string csv = "v\n";
    for (int i = 0; i < 99; ++i) csv += std::to_string(i) + "\n";
    csv += "bogus\n";
    auto ds = ingest_csv(csv);
    CHECK(ds.column(0).kind == ColumnKind::numeric);
    CHECK(ds.column(0).missing_count == 1);
    CHECK(ds.rows() == 100);
  }

  TEST_CASE("integer-valued columns") {
    auto ds = ingest_csv("i,f\n1,1.5\n2,2\n2,3\n");
    CHECK(ds.column(0).integer_valued);
    CHECK(ds.column(0).distinct_count == 2);
    CHECK_FALSE(ds.column(1).integer_valued);
  }

  TEST_CASE("column names are made unique") {
    auto ds = ingest_csv("a,a,\n1,2,3\n");
    CHECK(ds.column(0).name == "a");
    CHECK(ds.column(1).name == "a_2");
    CHECK(ds.column(2).name == "column_3");
  }

  TEST_CASE("quoted fields and tab delimiter") {
    auto ds = ingest_csv("name,v\n\"x, y\",1\n\"say \"\"hi\"\"\",2\n");
    CHECK(ds.cell_text(0, 0) == "x, y");
    CHECK(ds.cell_text(1, 0) == "say \"hi\"");
    auto tsv = ingest_csv("a\tb\n1\t2\n", CsvOptions{'\t', true});
    CHECK(tsv.cols() == 2);
    auto headerless = ingest_csv("1,2\n3,4\n", CsvOptions{',', false});
    CHECK(headerless.rows() == 2);
  }

  TEST_CASE("ingest is lossless and deterministic") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::vector<double> values(500);
    for (auto& v : values) v = u(rng);
    values[3] = 0.1;
    values[4] = 1e-300;
    values[5] = -0.0;
    std::vector<std::string> labels{"α", "b b", " padded", "x,y", "\"q\""};
    std::vector<std::string> cat(500);
    for (std::size_t i = 0; i < cat.size(); ++i) cat[i] = labels[i % labels.size()];
    std::vector<std::string> quoted = cat;
    for (auto& s : quoted) {
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      s = q + "\"";
    }
    const auto csv = testdata::to_csv({{"x", values}, {"c", quoted}});
    auto a = ingest_csv(csv);
    auto b = ingest_csv(csv);
    CHECK(a.id() == b.id());
    const auto& col = a.numeric(0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      CHECK(col.values[i] == values[i]);
      CHECK(std::signbit(col.values[i]) == std::signbit(values[i]));
    }
    for (std::size_t i = 0; i < cat.size(); ++i) {
      const auto& c = a.categorical(1);
      CHECK(c.dictionary[static_cast<std::size_t>(c.codes[i])] == cat[i]);
    }
    for (std::size_t i = 0; i < a.cols(); ++i) CHECK(a.column(i).kind == b.column(i).kind);
    const auto shorter = csv.substr(0, csv.rfind('\n', csv.size() - 2) + 1);
    CHECK(ingest_csv(shorter).id() != a.id());
  }

  TEST_CASE("get_rows") {
    auto ds = ingest_csv("a,b\nx,1\ny,2\nx,3\nz,4\n,100\n");
    const std::vector<std::size_t> all{0, 1};

    SUBCASE("limit zero keeps the total") {
      auto page = get_rows(ds, std::nullopt, all, 0);
      CHECK(page.total == 5);
      CHECK(page.row_indices.empty());
    }
    SUBCASE("predicate above the upper fence") {
      auto page = get_rows(ds, RowFilter{1, RowOp::gt, "7"}, all, 100);
      REQUIRE(page.row_indices == std::vector<std::size_t>{4});
      CHECK(page.cells[0][1] == "100");
      CHECK_FALSE(page.cells[0][0].has_value());
    }
    SUBCASE("full table in file order") {
      auto page = get_rows(ds, std::nullopt, all, kAllRows);
      CHECK(page.row_indices == std::vector<std::size_t>{0, 1, 2, 3, 4});
      CHECK(page.cells[2][0] == "x");
      CHECK(page.cells[2][1] == "3");
    }
    SUBCASE("category equality and paging") {
      auto page = get_rows(ds, RowFilter{0, RowOp::eq, "x"}, all, 1, 1);
      CHECK(page.total == 2);
      CHECK(page.row_indices == std::vector<std::size_t>{2});
    }
    SUBCASE("range predicates") {
      CHECK(get_rows(ds, RowFilter{1, RowOp::between, "2,4"}, all, 10).total == 3);
      CHECK(get_rows(ds, RowFilter{1, RowOp::outside, "2,4"}, all, 10).total == 2);
    }
    SUBCASE("errors") {
      const std::vector<std::size_t> bad{5};
      CHECK(code_of([&] { get_rows(ds, std::nullopt, bad, 1); }) == ErrorCode::invalid_argument);
      CHECK(code_of([&] { get_rows(ds, RowFilter{1, RowOp::gt, "abc"}, all, 1); }) == ErrorCode::invalid_argument);
      CHECK(code_of([&] { get_rows(ds, RowFilter{0, RowOp::lt, "x"}, all, 1); }) == ErrorCode::invalid_argument);
      CHECK(code_of([&] { get_rows(ds, RowFilter{1, RowOp::between, "4,2"}, all, 1); }) ==
            ErrorCode::invalid_argument);
    }
  }
}
