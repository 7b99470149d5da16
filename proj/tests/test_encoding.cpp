#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "procaudit/encoding.hpp"
#include "procaudit/error.hpp"
#include "procaudit/stats.hpp"
#include "procaudit/synthgen.hpp"

using namespace procaudit;

namespace {

const ColumnEncoding& vendor_encoding(const EncoderMap& m) {
  const auto* e = m.find("vendor_code");
  REQUIRE(e);
  return *e;
}

std::size_t feature_index(const FeatureMatrix& x, const std::string& name) {
  const auto it = std::find(x.names().begin(), x.names().end(), name);
  REQUIRE(it != x.names().end());
  return static_cast<std::size_t>(it - x.names().begin());
}

Dataset abc() { return testutil::vendor_dataset({"A", "A", "B"}, {10, 20, 30}); }

}  // namespace

TEST_CASE("stats helpers") {
  const std::vector<double> v = {3, 1, 2, 4};
  CHECK(stats::mean(v) == 2.5);
  CHECK(stats::median(v) == 2.5);
  CHECK(stats::quantile_linear(v, 0.25) == 1.75);
  CHECK(stats::population_std(std::vector<double>{0, 10}) == 5.0);
  CHECK(stats::mode(std::vector<double>{5, 3, 5, 3, 9}) == 3.0);
  CHECK(stats::all_equal(std::vector<double>{7, 7, 7}));
}

TEST_CASE("mean encoding of a two-group column") {
  const auto& e = vendor_encoding(fit_target_encoding(abc(), EncodingStrategy::Mean));
  CHECK(e.groups.at("A") == 15.0);
  CHECK(e.groups.at("B") == 30.0);
}

TEST_CASE("count encoding") {
  const auto& e = vendor_encoding(fit_target_encoding(abc(), EncodingStrategy::Count));
  CHECK(e.groups.at("A") == 2.0);
  CHECK(e.groups.at("B") == 1.0);
}

TEST_CASE("mode encoding breaks ties to the smaller amount") {
  const auto& e = vendor_encoding(fit_target_encoding(abc(), EncodingStrategy::Mode));
  CHECK(e.groups.at("A") == 10.0);
  CHECK(e.groups.at("B") == 30.0);
}

TEST_CASE("median encoding averages the middle pair") {
  const auto d = testutil::vendor_dataset({"A", "A", "A", "A", "B"}, {1, 2, 10, 40, 3});
  const auto& e = vendor_encoding(fit_target_encoding(d, EncodingStrategy::Median));
  CHECK(e.groups.at("A") == 6.0);
  CHECK(e.groups.at("B") == 3.0);
}

TEST_CASE("apply_encoding looks up each row") {
  const auto d = abc();
  const auto m = fit_target_encoding(d, EncodingStrategy::Mean);
  const auto enc = apply_encoding(d, m);
  const auto col = enc.matrix.column(feature_index(enc.matrix, "vendor_code"));
  CHECK(col == std::vector<double>{15, 15, 30});
  CHECK(enc.unseen.empty());
  CHECK(enc.matrix.row_ids() == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("unseen groups take the global statistic and are reported") {
  const auto m = fit_target_encoding(abc(), EncodingStrategy::Mean);
  auto other = testutil::vendor_dataset({"C", "A"}, {1, 1});
  const auto enc = apply_encoding(other, m);
  const auto f = feature_index(enc.matrix, "vendor_code");
  CHECK(enc.matrix.at(0, f) == 20.0);
  CHECK(enc.matrix.at(1, f) == 15.0);
  REQUIRE(enc.unseen.size() == 1);
  CHECK(enc.unseen[0].column == "vendor_code");
  CHECK(enc.unseen[0].value == "C");
  CHECK(enc.unseen[0].occurrences == 1);

  const auto count_map = fit_target_encoding(abc(), EncodingStrategy::Count);
  const auto counted = apply_encoding(other, count_map);
  CHECK(counted.matrix.at(0, f) == 0.0);
}

TEST_CASE("seventeen columns give seventeen features") {
  GenConfig cfg;
  cfg.n_records = 300;
  cfg.n_vendors = 20;
  cfg.n_requesters = 10;
  cfg.n_approvers = 10;
  const auto d = generate(cfg);
  REQUIRE(d.schema.columns.size() == 17);
  for (auto s : kAllStrategies) {
    const auto enc = apply_encoding(d, fit_target_encoding(d, s));
    CHECK(enc.matrix.cols() == 17);
    CHECK(enc.matrix.names() == d.schema.names());
    CHECK(enc.matrix.all_finite());
  }
}

TEST_CASE("encoder map JSON round trip") {
  const auto m = fit_target_encoding(abc(), EncodingStrategy::Median);
  CHECK(encoder_map_from_json(to_json(m)) == m);
}

TEST_CASE("strategy names") {
  for (auto s : kAllStrategies) CHECK(parse_strategy(to_string(s)) == s);
  CHECK_FALSE(parse_strategy("average"));
}

TEST_CASE("gaussian normalisation") {
  const auto n = gaussian_normalize(testutil::matrix({{0, 7, 1}, {10, 7, 2}}));
  CHECK(n.matrix.at(0, 0) == -1.0);
  CHECK(n.matrix.at(1, 0) == 1.0);
  CHECK(n.matrix.at(0, 1) == 0.0);
  CHECK(n.matrix.at(1, 1) == 0.0);
  CHECK(n.params.zero_variance == std::vector<bool>{false, true, false});

  const auto five = gaussian_normalize(testutil::matrix({{1}, {2}, {3}, {4}, {5}}));
  const auto col = five.matrix.column(0);
  CHECK(std::abs(stats::mean(col)) < 1e-15);
  CHECK(stats::population_std(col) == doctest::Approx(1.0).epsilon(1e-14));
}
