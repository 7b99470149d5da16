#include "procaudit/iforest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "procaudit/csv.hpp"
#include "procaudit/error.hpp"
#include "procaudit/rng.hpp"
#include "procaudit/stats.hpp"

namespace procaudit {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

std::size_t ceil_log2(std::size_t v) {
  std::size_t h = 0;
  while ((std::size_t{1} << h) < v) ++h;
  return h;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, Rng& rng, IsolationTree& tree)
      : x_(x), rng_(rng), tree_(tree), lo_(x.cols()), hi_(x.cols()) {}

  std::int32_t build(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                     std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes[id].size = static_cast<std::uint32_t>(end - begin);
    if (depth >= tree_.height_limit || end - begin <= 1) return id;

    std::fill(lo_.begin(), lo_.end(), std::numeric_limits<double>::infinity());
    std::fill(hi_.begin(), hi_.end(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = x_.row(rows[i]);
      for (std::size_t f = 0; f < row.size(); ++f) {
        lo_[f] = std::min(lo_[f], row[f]);
        hi_[f] = std::max(hi_[f], row[f]);
      }
    }
    // Features that admit a value strictly inside (min, max).
    splittable_.clear();
    for (std::size_t f = 0; f < lo_.size(); ++f) {
      if (std::nextafter(lo_[f], hi_[f]) < hi_[f]) splittable_.push_back(f);
    }
    if (splittable_.empty()) return id;

    const std::size_t f = splittable_[rng_.below(splittable_.size())];
    const double lo = lo_[f];
    const double hi = hi_[f];
    double split = lo + rng_.uniform() * (hi - lo);
    if (!(lo < split && split < hi)) split = std::nextafter(lo, hi);

    const auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                    rows.begin() + static_cast<std::ptrdiff_t>(end),
                                    [&](std::size_t r) { return x_.at(r, f) < split; }) -
                     rows.begin();
    const auto m = static_cast<std::size_t>(mid);
    const auto left = build(rows, begin, m, depth + 1);
    const auto right = build(rows, m, end, depth + 1);
    auto& node = tree_.nodes[id];
    node.feature = static_cast<std::int32_t>(f);
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

 private:
  const FeatureMatrix& x_;
  Rng& rng_;
  IsolationTree& tree_;
  std::vector<double> lo_, hi_;
  std::vector<std::size_t> splittable_;
};

}  // namespace

double harmonic_number(std::size_t i) {
  if (i < 64) {
    double h = 0.0;
    for (std::size_t k = 1; k <= i; ++k) h += 1.0 / static_cast<double>(k);
    return h;
  }
  const double n = static_cast<double>(i);
  const double n2 = n * n;
  return std::log(n) + kEulerGamma + 1.0 / (2.0 * n) - 1.0 / (12.0 * n2) +
         1.0 / (120.0 * n2 * n2);
}

double average_path_length(std::size_t m) {
  if (m <= 1) return 0.0;
  const double dm = static_cast<double>(m);
  return 2.0 * harmonic_number(m - 1) - 2.0 * (dm - 1.0) / dm;
}

ForestModel iforest_train(const FeatureMatrix& x, std::uint64_t seed, const ForestParams& params) {
  if (x.rows() < 2) throw DataError("isolation forest needs at least 2 rows");
  if (params.n_trees == 0 || params.sample_size < 2) {
    throw ConfigError("isolation forest needs n_trees >= 1 and sample_size >= 2");
  }
  if (!x.all_finite()) throw DataError("isolation forest input has non-finite values");

  const std::size_t n = x.rows();
  const std::size_t psi = std::min(params.sample_size, n);
  ForestModel forest;
  forest.sample_size = params.sample_size;
  forest.n_features = x.cols();
  forest.seed = seed;
  forest.trees.resize(params.n_trees);

  std::vector<std::size_t> rows(n);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(seed, "itree", t));
    std::iota(rows.begin(), rows.end(), 0);
    for (std::size_t i = 0; i < psi && psi < n; ++i) std::swap(rows[i], rows[i + rng.below(n - i)]);
    auto& tree = forest.trees[t];
    tree.height_limit = ceil_log2(psi);
    TreeBuilder builder(x, rng, tree);
    builder.build(rows, 0, psi, 0);
  }
  return forest;
}

double path_length(const IsolationTree& tree, std::span<const double> row) {
  std::size_t id = 0;
  std::size_t depth = 0;
  while (!tree.nodes[id].leaf()) {
    const auto& node = tree.nodes[id];
    id = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] < node.split
                                      ? node.left
                                      : node.right);
    ++depth;
  }
  return static_cast<double>(depth) + average_path_length(tree.nodes[id].size);
}

double total_path_length(const ForestModel& forest, std::span<const double> row) {
  double total = 0.0;
  for (const auto& tree : forest.trees) total += path_length(tree, row);
  return total;
}

ScoreTable scores_from_path_lengths(std::vector<double> totals, std::size_t n_trees,
                                    std::vector<std::int64_t> row_ids) {
  if (n_trees == 0) throw ConfigError("n_trees must be >= 1");
  ScoreTable s;
  s.n_trees = n_trees;
  if (row_ids.empty()) {
    row_ids.resize(totals.size());
    std::iota(row_ids.begin(), row_ids.end(), 0);
  }
  s.row_ids = std::move(row_ids);
  s.total_path_length = std::move(totals);
  const std::size_t n = s.total_path_length.size();
  s.mean_path_length.resize(n);
  s.prediction.assign(n, 0.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    s.mean_path_length[i] = s.total_path_length[i] / static_cast<double>(n_trees);
  }
  const auto [mn, mx] = std::minmax_element(s.mean_path_length.begin(), s.mean_path_length.end());
  s.min_mean_path_length = *mn;
  s.max_mean_path_length = *mx;
  const double range = s.max_mean_path_length - s.min_mean_path_length;
  if (range > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      s.prediction[i] = (s.max_mean_path_length - s.mean_path_length[i]) / range;
    }
  }
  return s;
}

ScoreTable predict_scores(const ForestModel& forest, const FeatureMatrix& x) {
  if (x.cols() != forest.n_features) throw DataError("feature width does not match the forest");
  std::vector<double> totals(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) totals[r] = total_path_length(forest, x.row(r));
  return scores_from_path_lengths(std::move(totals), forest.trees.size(), x.row_ids());
}

double normalized_prediction(const ForestModel& forest, std::span<const double> row,
                             double max_mean_path_length, double min_mean_path_length) {
  const double range = max_mean_path_length - min_mean_path_length;
  if (!(range > 0.0)) return 0.0;
  const double mean = total_path_length(forest, row) / static_cast<double>(forest.trees.size());
  return (max_mean_path_length - mean) / range;
}

ThresholdResult iforest_threshold(const ScoreTable& scores, double quantile, std::size_t cap) {
  if (scores.size() == 0) throw DataError("cannot threshold an empty score table");
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw ConfigError("quantile must be in [0, 1]");
  ThresholdResult out;
  const auto& p = scores.prediction;
  out.threshold = stats::quantile_linear(p, quantile);
  out.flags.assign(p.size(), false);
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= out.threshold) hits.push_back(i);
  }
  if (stats::all_equal(p)) {
    out.warnings.push_back("degenerate score distribution: every prediction is equal");
  }
  if (hits.size() > cap) {
    std::stable_sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
      if (p[a] != p[b]) return p[a] > p[b];
      return scores.row_ids[a] < scores.row_ids[b];
    });
    hits.resize(cap);
    out.capped = true;
  }
  for (auto i : hits) out.flags[i] = true;
  out.flagged = hits.size();
  return out;
}

void write_score_table_csv(std::ostream& out, const ScoreTable& scores,
                           const std::vector<bool>& flags) {
  out << "row_id,mean_path_length,prediction,flagged\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << scores.row_ids[i] << ',' << format_double(scores.mean_path_length[i]) << ','
        << format_double(scores.prediction[i]) << ',' << (flags.at(i) ? 1 : 0) << '\n';
  }
}

nlohmann::json to_json(const ForestModel& forest) {
  nlohmann::json j;
  j["sample_size"] = forest.sample_size;
  j["n_features"] = forest.n_features;
  j["seed"] = forest.seed;
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& t : forest.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.split, n.left, n.right, n.size});
    trees.push_back({{"height_limit", t.height_limit}, {"nodes", std::move(nodes)}});
  }
  return j;
}

ForestModel forest_from_json(const nlohmann::json& j) {
  ForestModel forest;
  forest.sample_size = j.at("sample_size").get<std::size_t>();
  forest.n_features = j.at("n_features").get<std::size_t>();
  forest.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("trees")) {
    IsolationTree tree;
    tree.height_limit = t.at("height_limit").get<std::size_t>();
    for (const auto& n : t.at("nodes")) {
      tree.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(),
                            n.at(2).get<std::int32_t>(), n.at(3).get<std::int32_t>(),
                            n.at(4).get<std::uint32_t>()});
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace procaudit
