#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "procaudit/feature_matrix.hpp"

namespace procaudit {

struct IsolationTree {
  struct Node {
    std::int32_t feature = -1;  // -1 for leaves
    double split = 0.0;         // left: value < split, right: value >= split
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t size = 0;     // training rows that reached the node

    bool leaf() const { return feature < 0; }
    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  std::size_t height_limit = 0;

  bool operator==(const IsolationTree&) const = default;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t sample_size = 256;
};

struct ForestModel {
  std::vector<IsolationTree> trees;
  std::size_t sample_size = 256;
  std::size_t n_features = 0;
  std::uint64_t seed = 0;

  bool operator==(const ForestModel&) const = default;
};

// H(i) = 1 + 1/2 + ... + 1/i; exact summation for small i, asymptotic
// expansion beyond.
double harmonic_number(std::size_t i);

// c(m) = 2 H(m - 1) - 2 (m - 1) / m, c(1) = c(0) = 0: average unsuccessful
// search length in a binary search tree of m keys.
double average_path_length(std::size_t m);

// Tree t draws its subsample and splits from derive_seed(seed, "itree", t).
// Subsamples are without replacement, clamped to the number of rows.
ForestModel iforest_train(const FeatureMatrix& x, std::uint64_t seed,
                          const ForestParams& params = {});

// Edges to the terminating leaf plus c(leaf size).
double path_length(const IsolationTree& tree, std::span<const double> row);
double total_path_length(const ForestModel& forest, std::span<const double> row);

struct ScoreTable {
  std::vector<std::int64_t> row_ids;
  std::vector<double> total_path_length;
  std::vector<double> mean_path_length;
  std::vector<double> prediction;
  std::size_t n_trees = 0;
  double max_mean_path_length = 0.0;
  double min_mean_path_length = 0.0;

  std::size_t size() const { return prediction.size(); }
};

// mean = total / n_trees; prediction = (max - mean) / (max - min), all zero
// when every mean is equal.
ScoreTable scores_from_path_lengths(std::vector<double> totals, std::size_t n_trees,
                                    std::vector<std::int64_t> row_ids = {});
ScoreTable predict_scores(const ForestModel& forest, const FeatureMatrix& x);

// Prediction of an arbitrary point, normalised by a scored dataset's range.
double normalized_prediction(const ForestModel& forest, std::span<const double> row,
                             double max_mean_path_length, double min_mean_path_length);

struct ThresholdResult {
  std::vector<bool> flags;
  double threshold = 0.0;
  std::size_t flagged = 0;
  bool capped = false;
  std::vector<std::string> warnings;
};

// prediction >= linear-interpolated quantile; above `cap` rows only the cap
// highest predictions stay flagged, ties at the cut to the lower row_id.
ThresholdResult iforest_threshold(const ScoreTable& scores, double quantile = 0.99,
                                  std::size_t cap = 500);

void write_score_table_csv(std::ostream& out, const ScoreTable& scores,
                           const std::vector<bool>& flags);

nlohmann::json to_json(const ForestModel& forest);
ForestModel forest_from_json(const nlohmann::json& j);

}  // namespace procaudit
