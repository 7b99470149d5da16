#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "procaudit/clustering.hpp"
#include "procaudit/error.hpp"

using namespace procaudit;

namespace {

FeatureMatrix four_points() { return testutil::matrix({{0, 0}, {0, 1}, {10, 10}, {10, 11}}); }

std::vector<int> as_int(const std::vector<std::int32_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("k-Means on two tight pairs") {
  const auto m = kmeans_fit(four_points(), 2, 1);
  CHECK(m.sse == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.assignments[0] == m.assignments[1]);
  CHECK(m.assignments[2] == m.assignments[3]);
  CHECK(m.assignments[0] != m.assignments[2]);
  const auto low = m.centroid(m.assignments[0]);
  const auto high = m.centroid(m.assignments[2]);
  CHECK(low[0] == 0.0);
  CHECK(low[1] == 0.5);
  CHECK(high[0] == 10.0);
  CHECK(high[1] == 10.5);
}

TEST_CASE("k equal to the row count puts every point on its own centroid") {
  const auto m = kmeans_fit(four_points(), 4, 3);
  CHECK(m.sse == 0.0);
  CHECK(std::set<std::int32_t>(m.assignments.begin(), m.assignments.end()).size() == 4);
}

TEST_CASE("k-Means recovers well separated blobs") {
  std::vector<int> truth;
  const auto x = testutil::blobs(1000, 3, 2, 20.0, 0.5, 17, &truth);
  const auto m = kmeans_fit(x, 3, 5);
  std::map<int, std::set<std::int32_t>> mapping;
  for (std::size_t i = 0; i < truth.size(); ++i) mapping[truth[i]].insert(m.assignments[i]);
  std::set<std::int32_t> used;
  for (const auto& [blob, labels] : mapping) {
    CHECK(labels.size() == 1);
    used.insert(*labels.begin());
  }
  CHECK(used.size() == 3);
}

TEST_CASE("k-Means is deterministic and keeps SSE history monotone") {
  const auto x = testutil::blobs(600, 5, 3, 2.0, 1.0, 4);
  const auto a = kmeans_fit(x, 6, 99);
  const auto b = kmeans_fit(x, 6, 99);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids == b.centroids);
  for (std::size_t i = 1; i < a.sse_history.size(); ++i) {
    CHECK(a.sse_history[i] <= a.sse_history[i - 1] * (1 + 1e-12));
  }
  CHECK(a.sse == doctest::Approx(recompute_sse(x, a)).epsilon(1e-12));
}

TEST_CASE("k-Means argument checks") {
  CHECK_THROWS_AS(kmeans_fit(four_points(), 1, 0), ConfigError);
  CHECK_THROWS_AS(kmeans_fit(four_points(), 5, 0), ConfigError);
}

TEST_CASE("elbow sweep") {
  const auto x = testutil::blobs(300, 3, 2, 15.0, 1.0, 8);
  CHECK(elbow_sweep(x, 2, 2, 1).size() == 1);
  const auto curve = elbow_sweep(x, 2, 6, 1);
  REQUIRE(curve.size() == 5);
  CHECK(curve[0].k == 2);
  const double drop_to_3 = curve[0].sse - curve[1].sse;
  const double drop_after = curve[1].sse - curve[2].sse;
  CHECK(drop_to_3 > 10 * drop_after);
}

TEST_CASE("duplicating every row doubles the SSE") {
  const auto x = testutil::blobs(200, 4, 2, 6.0, 1.0, 12);
  auto rows = testutil::rows_of(x);
  auto doubled = rows;
  for (const auto& r : rows) doubled.push_back(r);
  const auto once = kmeans_fit(x, 4, 3);
  const auto twice = kmeans_fit(testutil::matrix(doubled), 4, 3);
  CHECK(twice.sse == doctest::Approx(2 * once.sse).epsilon(1e-9));
}

TEST_CASE("silhouette of the two pairs") {
  const auto r = silhouette_full(four_points(), std::vector<std::int32_t>{0, 0, 1, 1});
  const double b = (std::sqrt(200.0) + std::sqrt(221.0)) / 2.0;
  CHECK(r.values[0] == doctest::Approx((b - 1.0) / b).epsilon(1e-12));
  CHECK(r.values[0] == doctest::Approx(0.931).epsilon(1e-3));
  CHECK_FALSE(r.sampled);
}

TEST_CASE("coincident clusters score 1 and equidistant points score 0") {
  const auto dup = testutil::matrix({{0, 0}, {0, 0}, {5, 5}, {5, 5}});
  const auto r = silhouette_full(dup, std::vector<std::int32_t>{0, 0, 1, 1});
  CHECK(r.overall == 1.0);
  for (double v : r.values) CHECK(v == 1.0);

  // Point 1 sits at distance 1 from both its cluster mate and the other cluster.
  const auto line = testutil::matrix({{0}, {1}, {2}});
  const auto eq = silhouette_full(line, std::vector<std::int32_t>{0, 0, 1});
  CHECK(eq.values[1] == 0.0);
  CHECK(eq.values[2] == 0.0);
}

TEST_CASE("silhouette matches brute force and ignores label names") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = testutil::blobs(80 + trial * 7, 4, 3, 1.5, 1.0, 100 + trial);
    std::vector<std::int32_t> labels(x.rows());
    for (auto& l : labels) l = static_cast<std::int32_t>(rng.below(4));
    const auto r = silhouette_full(x, labels);
    const auto o = oracle::silhouette(testutil::rows_of(x), as_int(labels));
    for (std::size_t i = 0; i < x.rows(); ++i) CHECK(std::abs(r.values[i] - o.values[i]) < 1e-12);

    std::vector<std::int32_t> permuted(labels);
    for (auto& l : permuted) l = (l + 2) % 4 + 10;
    CHECK(silhouette_full(x, permuted).values == r.values);
  }
}

TEST_CASE("sampled silhouette") {
  const auto x = testutil::blobs(500, 3, 2, 6.0, 1.0, 6);
  const auto m = kmeans_fit(x, 3, 2);
  const auto full = silhouette_full(x, m.assignments);
  const auto all = silhouette_sampled(x, m.assignments, 1.0, 77);
  CHECK(all.values == full.values);
  CHECK(all.overall == full.overall);
  CHECK(all.sampled);
  const auto tenth = silhouette_sampled(x, m.assignments, 0.1, 77);
  CHECK(std::is_sorted(tenth.positions.begin(), tenth.positions.end()));
  const auto again = silhouette_sampled(x, m.assignments, 0.1, 77);
  CHECK(again.positions == tenth.positions);
  CHECK(again.values == tenth.values);
  CHECK(silhouette_sampled(x, m.assignments, 0.1, 78).positions != tenth.positions);
}

TEST_CASE("stratified sample sizes use the ceiling") {
  std::vector<std::int32_t> labels(1000, 0);
  labels.resize(1010, 1);
  const auto s = stratified_sample(labels, 0.1, 1);
  std::size_t small = 0;
  for (auto p : s) small += labels[p] == 1;
  CHECK(s.size() == 101);
  CHECK(small == 1);
}

TEST_CASE("model selection") {
  std::vector<ModelCandidate> c = {{EncodingStrategy::Mean, 2, 0.6}, {EncodingStrategy::Mean, 5, 0.4}};
  auto s = select_model(c);
  CHECK(s.k == 2);
  CHECK(s.structure == ClusterStructure::Reasonable);

  c = {{EncodingStrategy::Mode, 3, 0.3}, {EncodingStrategy::Mean, 4, 0.3},
       {EncodingStrategy::Count, 3, 0.3}, {EncodingStrategy::Median, 2, 0.3}};
  s = select_model(c);
  CHECK(s.k == 2);
  CHECK(s.strategy == EncodingStrategy::Median);
  c.pop_back();
  s = select_model(c);
  CHECK(s.strategy == EncodingStrategy::Count);
  CHECK(s.index == 2);

  c = {{EncodingStrategy::Mode, 8, 0.41}, {EncodingStrategy::Mean, 8, 0.2}};
  s = select_model(c);
  CHECK(s.strategy == EncodingStrategy::Mode);
  CHECK(s.structure == ClusterStructure::Weak);

  CHECK(classify_structure(0.71) == ClusterStructure::Strong);
  CHECK(classify_structure(0.7) == ClusterStructure::Reasonable);
  CHECK(classify_structure(0.5) == ClusterStructure::Weak);
}

TEST_CASE("model selection is invariant under monotone rescaling") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ModelCandidate> c;
    for (std::size_t k = 2; k < 10; ++k) {
      for (auto s : kAllStrategies) c.push_back({s, k, std::round(rng.uniform() * 20) / 20});
    }
    auto rescaled = c;
    for (auto& m : rescaled) m.silhouette = std::exp(3 * m.silhouette) - 7;
    CHECK(select_model(c).index == select_model(rescaled).index);
  }
}
