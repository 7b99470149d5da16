#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "procaudit/csv.hpp"
#include "procaudit/error.hpp"
#include "procaudit/ingest.hpp"
#include "procaudit/synthgen.hpp"

using namespace procaudit;

namespace {

const char* kHeader =
    "order_id,item_id,group_category,material_category,item_description,vendor_code,"
    "requester_id,buyer_id,approver_id,org_code,amount\n";

std::string data_row(int i, const std::string& amount) {
  const auto s = std::to_string(i);
  return "PO" + s + ",IT" + s + ",G1,M1,desc " + s + ",V" + s + ",R1,B1,A1,O1," + amount + "\n";
}

std::filesystem::path write_file(const std::string& name, const std::string& body) {
  const auto path = testutil::scratch_dir("ingest_" + name) / "in.csv";
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("csv reader handles quoting, CRLF and a BOM") {
  std::istringstream in("\xEF\xBB\xBF" "a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",z\r\n");
  const auto t = read_csv(in);
  REQUIRE(t.header == CsvRow{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == CsvRow{"x,1", "say \"hi\""});
  CHECK(t.rows[1] == CsvRow{"multi\nline", "z"});
  CHECK(t.lines == std::vector<std::size_t>{2, 3});
}

TEST_CASE("csv reader rejects ragged rows") {
  std::istringstream in("a,b\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(in), DataError);
}

TEST_CASE("csv writer quotes only when needed and round-trips") {
  std::ostringstream out;
  write_csv_row(out, {"plain", "with,comma", "with \"quote\"", ""});
  CHECK(out.str() == "plain,\"with,comma\",\"with \"\"quote\"\"\",\n");
  std::istringstream in("h1,h2,h3,h4\n" + out.str());
  CHECK(read_csv(in).rows.at(0) == CsvRow{"plain", "with,comma", "with \"quote\"", ""});
}

TEST_CASE("format_double is shortest round-trip text") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(100.0) == "100");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("three-row file loads with row ids 0..2") {
  const auto path =
      write_file("three", std::string(kHeader) + data_row(0, "1.5") + data_row(1, "2") + data_row(2, "3e2"));
  const auto d = load_transactions(path, Schema::standard());
  REQUIRE(d.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(d.records[i].row_id == i);
  CHECK(d.records[2].amount == 300.0);
  CHECK(d.records[0].item_description == "desc 0");
}

TEST_CASE("header missing a schema column is rejected") {
  std::string header = kHeader;
  header.replace(header.find("buyer_id,"), 9, "");
  const auto path = write_file("header", header + "PO1,IT1,G,M,D,V,R,A,O,5\n");
  CHECK_THROWS_AS(load_transactions(path, Schema::standard()), DataError);
  CHECK_THROWS_AS(load_transactions(path), DataError);
}

TEST_CASE("unparseable amount names its row") {
  std::string body = kHeader;
  for (int i = 0; i < 8; ++i) body += data_row(i, i == 5 ? "abc" : "10");
  const auto path = write_file("amount", body);
  try {
    load_transactions(path, Schema::standard());
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 5") != std::string::npos);
  }
}

TEST_CASE("parse_amount is strict") {
  CHECK(parse_amount("12.5") == 12.5);
  CHECK(parse_amount("-3") == -3.0);
  CHECK(parse_amount("1e3") == 1000.0);
  CHECK_FALSE(parse_amount("1,000"));
  CHECK_FALSE(parse_amount("0x10"));
  CHECK_FALSE(parse_amount("inf"));
  CHECK_FALSE(parse_amount("nan"));
  CHECK_FALSE(parse_amount("12abc"));
}

TEST_CASE("missing tokens") {
  for (const char* t : {"", "NA", "na", "null", "NULL", "  Null "}) CHECK(is_missing_token(t));
  CHECK_FALSE(is_missing_token("N/A0"));
  CHECK_FALSE(is_missing_token("0"));
}

TEST_CASE("header order can be inferred") {
  std::string body =
      "amount,order_id,item_id,group_category,material_category,item_description,vendor_code,"
      "requester_id,buyer_id,approver_id,org_code,plant\n"
      "9,PO1,IT1,G,M,D,V,R,B,A,O,P1\n";
  const auto d = load_transactions(write_file("infer", body));
  REQUIRE(d.size() == 1);
  CHECK(d.records[0].amount == 9.0);
  CHECK(*d.records[0].text("plant") == "P1");
}

TEST_CASE("clean drops incomplete records and renumbers") {
  const auto path = write_file("clean", std::string(kHeader) + data_row(0, "1") + data_row(1, "NA") +
                                            data_row(2, "3") + data_row(3, ""));
  const auto raw = load_transactions(path, Schema::standard());
  const auto c = clean(raw);
  CHECK(c.removed == 2);
  REQUIRE(c.dataset.size() == 2);
  CHECK(c.dataset.records[1].row_id == 1);
  CHECK(c.dataset.records[1].source_row == 2);

  const auto again = clean(c.dataset);
  CHECK(again.removed == 0);
  CHECK(again.dataset == c.dataset);
}

TEST_CASE("clean removes records with a missing categorical") {
  auto d = testutil::vendor_dataset({"A", "B", "C"}, {1, 2, 3});
  d.records[1].buyer_id = "null";
  const auto c = clean(d);
  CHECK(c.removed == 1);
  CHECK(c.dataset.records[1].vendor_code == "C");
}

TEST_CASE("clean of an all-missing dataset is an error") {
  auto d = testutil::vendor_dataset({"A"}, {1});
  d.records[0].amount.reset();
  CHECK_THROWS_AS(clean(d), DataError);
}

TEST_CASE("profile counts distinct vendors") {
  const auto p = profile(testutil::vendor_dataset({"A", "A", "B", "B", "B", "C"}, {1, 2, 3, 4, 5, 6}));
  CHECK(p.records == 6);
  CHECK(p.distinct("vendor_code") == 3);
  CHECK(p.total_amount == doctest::Approx(21.0));
}

TEST_CASE("profile of one-item orders with one requester each") {
  auto d = testutil::vendor_dataset({"A", "B", "C", "D"}, {1, 2, 3, 4});
  for (std::size_t i = 0; i < d.size(); ++i) d.records[i].requester_id = "R" + std::to_string(i);
  const auto p = profile(d);
  const auto* e = p.entity("requester_id", "order_id");
  REQUIRE(e);
  CHECK(e->min == 1);
  CHECK(e->max == 1);
  CHECK(e->mean == 1.0);
}

TEST_CASE("load and save round-trip a generated dataset") {
  GenConfig cfg;
  cfg.n_records = 500;
  cfg.n_vendors = 40;
  cfg.n_requesters = 12;
  cfg.n_approvers = 9;
  const auto d = generate(cfg);
  const auto path = testutil::scratch_dir("roundtrip") / "d.csv";
  save_transactions(path, d);
  CHECK(load_transactions(path) == d);
  CHECK(clean(d).dataset == d);
}
