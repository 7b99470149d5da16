#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "procaudit/error.hpp"
#include "procaudit/iforest.hpp"

using namespace procaudit;

namespace {

using Node = IsolationTree::Node;

// Root splits f0 at 5; left splits f0 at 2 into leaves of size 2 and 1;
// right splits f1 at 0, then f1 at -1 into two single-row leaves.
IsolationTree hand_tree() {
  IsolationTree t;
  t.height_limit = 3;
  t.nodes = {
      Node{0, 5.0, 1, 2, 8}, Node{0, 2.0, 3, 4, 3}, Node{1, 0.0, 5, 6, 5},
      Node{-1, 0, -1, -1, 2}, Node{-1, 0, -1, -1, 1}, Node{1, -1.0, 7, 8, 2},
      Node{-1, 0, -1, -1, 3}, Node{-1, 0, -1, -1, 1}, Node{-1, 0, -1, -1, 1},
  };
  return t;
}

void check_tree_shape(const IsolationTree& t) {
  std::function<void(std::int32_t, std::size_t)> walk = [&](std::int32_t i, std::size_t depth) {
    const auto& n = t.nodes[i];
    CHECK(depth <= t.height_limit);
    if (n.leaf()) return;
    const auto& l = t.nodes[n.left];
    const auto& r = t.nodes[n.right];
    CHECK(l.size > 0);
    CHECK(r.size > 0);
    CHECK(l.size + r.size == n.size);
    walk(n.left, depth + 1);
    walk(n.right, depth + 1);
  };
  walk(0, 0);
}

}  // namespace

TEST_CASE("average path length") {
  CHECK(average_path_length(0) == 0.0);
  CHECK(average_path_length(1) == 0.0);
  CHECK(average_path_length(2) == 1.0);
  CHECK(harmonic_number(1) == 1.0);
  CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("c(m) matches the harmonic sum up to a million") {
  std::vector<std::size_t> ms(2000);
  std::iota(ms.begin(), ms.end(), 1);
  for (std::size_t m = 2048; m <= 1000000; m = m * 3 / 2) ms.push_back(m);
  ms.push_back(1000000);
  double worst = 0.0;
  for (auto m : ms) worst = std::max(worst, std::abs(average_path_length(m) - oracle::c_factor(m)));
  CHECK(worst < 1e-9);
}

TEST_CASE("path length through a hand-built tree") {
  const auto t = hand_tree();
  CHECK(path_length(t, std::vector<double>{6, -2}) == 3.0);
  CHECK(path_length(t, std::vector<double>{1, 0}) == 3.0);
  CHECK(path_length(t, std::vector<double>{3, 0}) == 2.0);
  CHECK(path_length(t, std::vector<double>{9, 4}) == 2.0 + average_path_length(3));
}

TEST_CASE("prediction formula") {
  const auto s = scores_from_path_lengths({1000.0, 400.0, 200.0, 700.0}, 100);
  CHECK(s.mean_path_length == std::vector<double>{10.0, 4.0, 2.0, 7.0});
  CHECK(s.max_mean_path_length == 10.0);
  CHECK(s.min_mean_path_length == 2.0);
  CHECK(s.prediction[1] == 0.75);
  CHECK(s.prediction[0] == 0.0);
  CHECK(s.prediction[2] == 1.0);
  CHECK(s.row_ids == std::vector<std::int64_t>{0, 1, 2, 3});

  const auto flat = scores_from_path_lengths({300.0, 300.0}, 100);
  CHECK(flat.prediction == std::vector<double>{0.0, 0.0});
}

TEST_CASE("thresholding by quantile and cap") {
  auto distinct = [](std::size_t n) {
    std::vector<double> totals(n);
    for (std::size_t i = 0; i < n; ++i) totals[i] = 100.0 * (1000.0 + static_cast<double>((i * 7919) % n));
    return scores_from_path_lengths(totals, 100);
  };
  const auto t10k = iforest_threshold(distinct(10000));
  CHECK(t10k.flagged == 100);
  CHECK_FALSE(t10k.capped);
  CHECK(std::count(t10k.flags.begin(), t10k.flags.end(), true) == 100);

  const auto s100k = distinct(100000);
  const auto t100k = iforest_threshold(s100k);
  CHECK(t100k.flagged == 500);
  CHECK(t100k.capped);
  double lowest_flagged = 2.0, highest_unflagged = -1.0;
  for (std::size_t i = 0; i < s100k.size(); ++i) {
    if (t100k.flags[i]) {
      lowest_flagged = std::min(lowest_flagged, s100k.prediction[i]);
    } else {
      highest_unflagged = std::max(highest_unflagged, s100k.prediction[i]);
    }
  }
  CHECK(lowest_flagged > highest_unflagged);
}

TEST_CASE("equal scores: first rows by row id, with a warning") {
  const auto s = scores_from_path_lengths(std::vector<double>(1000, 500.0), 100);
  const auto t = iforest_threshold(s, 0.99, 10);
  CHECK(t.flagged == 10);
  for (std::size_t i = 0; i < 1000; ++i) CHECK(t.flags[i] == (i < 10));
  CHECK_FALSE(t.warnings.empty());
}

TEST_CASE("training clamps the subsample and respects the tree invariants") {
  Rng rng(2);
  std::vector<std::vector<double>> rows(100, std::vector<double>(3));
  for (auto& r : rows) for (auto& v : r) v = rng.normal();
  const auto x = testutil::matrix(rows);
  const auto f = iforest_train(x, 7);
  CHECK(f.trees.size() == 100);
  for (const auto& t : f.trees) {
    CHECK(t.nodes[0].size == 100);
    CHECK(t.height_limit == 7);
    check_tree_shape(t);
  }
  CHECK(iforest_train(x, 7) == f);
  CHECK_FALSE(iforest_train(x, 8) == f);
}

TEST_CASE("constant data grows single-leaf trees") {
  const auto x = testutil::matrix(std::vector<std::vector<double>>(50, {1.0, 2.0}));
  const auto f = iforest_train(x, 1, {10, 256});
  for (const auto& t : f.trees) CHECK(t.nodes.size() == 1);
  const auto s = predict_scores(f, x);
  for (double m : s.mean_path_length) CHECK(m == doctest::Approx(average_path_length(50)).epsilon(1e-14));
  CHECK(std::all_of(s.prediction.begin(), s.prediction.end(), [](double p) { return p == 0.0; }));
}

TEST_CASE("predictions span [0, 1] and ignore row order") {
  const auto x = testutil::blobs(400, 2, 3, 4.0, 1.0, 19);
  const auto f = iforest_train(x, 3);
  const auto s = predict_scores(f, x);
  CHECK(std::count(s.prediction.begin(), s.prediction.end(), 1.0) == 1);
  CHECK(std::count(s.prediction.begin(), s.prediction.end(), 0.0) == 1);
  for (double p : s.prediction) CHECK((p >= 0.0 && p <= 1.0));

  std::vector<std::size_t> reversed(x.rows());
  std::iota(reversed.rbegin(), reversed.rend(), 0);
  const auto r = predict_scores(f, x.select_rows(reversed));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    CHECK(r.mean_path_length[x.rows() - 1 - i] == s.mean_path_length[i]);
  }
  CHECK(normalized_prediction(f, x.row(5), s.max_mean_path_length, s.min_mean_path_length) ==
        doctest::Approx(s.prediction[5]).epsilon(1e-15));
}

TEST_CASE("an isolated point gets the top prediction across seeds") {
  Rng rng(77);
  std::vector<std::vector<double>> rows(999, std::vector<double>(2));
  for (auto& r : rows) for (auto& v : r) v = rng.normal() * 0.1;
  rows.push_back({5.0, 5.0});
  const auto x = testutil::matrix(rows);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = predict_scores(iforest_train(x, seed), x);
    wins += std::max_element(s.prediction.begin(), s.prediction.end()) - s.prediction.begin() == 999;
  }
  CHECK(wins >= 95);
}

TEST_CASE("forest JSON round trip") {
  const auto x = testutil::blobs(200, 2, 2, 4.0, 1.0, 5);
  const auto f = iforest_train(x, 11, {5, 64});
  CHECK(forest_from_json(to_json(f)) == f);
}

TEST_CASE("iforest argument checks") {
  const auto x = testutil::matrix({{1.0}});
  CHECK_THROWS_AS(iforest_train(x, 1), DataError);
  CHECK_THROWS_AS(scores_from_path_lengths({1.0}, 0), ConfigError);
}
