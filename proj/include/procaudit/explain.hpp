#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "procaudit/feature_matrix.hpp"
#include "procaudit/iforest.hpp"

namespace procaudit {

using ScoringFunction = std::function<double(std::span<const double>)>;

struct ShapleyMode {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  std::size_t n_permutations = 256;
  std::uint64_t seed = 0;

  static ShapleyMode exact() { return {}; }
  static ShapleyMode sampled(std::size_t n, std::uint64_t seed) {
    return {Kind::Sampled, n, seed};
  }
};

inline constexpr std::size_t kMaxExactFeatures = 12;

struct AttributionVector {
  std::int64_t row_id = 0;
  std::vector<std::string> features;
  // Score of the reference point (every feature absent).
  double baseline = 0.0;
  double prediction = 0.0;
  std::vector<double> values;
  double reconstructed = 0.0;  // baseline + sum(values)
  double tolerance = 1e-9;
  bool exact = true;
};

// Shapley values of `score` at `row`; absent features take the reference
// value. Exact mode enumerates all 2^d coalitions (d <= 12); sampled mode
// averages marginal contributions over random feature orderings.
AttributionVector shapley_attributions(const ScoringFunction& score, std::span<const double> row,
                                       std::span<const double> reference,
                                       std::vector<std::string> features, const ShapleyMode& mode);

// Column means of the background set.
std::vector<double> background_mean(const FeatureMatrix& background);

// Normalised forest prediction over a scored dataset's path-length range.
ScoringFunction forest_scoring_function(const ForestModel& forest, double max_mean_path_length,
                                        double min_mean_path_length);

AttributionVector explain_row(const ForestModel& forest, const ScoreTable& scores,
                              const FeatureMatrix& x, std::size_t position,
                              const FeatureMatrix& background, const ShapleyMode& mode);

// Largest |value| first; ties keep feature order.
std::vector<std::pair<std::string, double>> top_contributors(const AttributionVector& a,
                                                             std::size_t n = 3);

struct FeatureImportance {
  std::string feature;
  double mean_abs_attribution = 0.0;
};

// Mean |attribution| per feature over the rows, ranked descending.
std::vector<FeatureImportance> summarize_attributions(std::span<const AttributionVector> rows);

// Per-row seeds derive from mode.seed and the row_id.
std::vector<FeatureImportance> global_attribution_summary(const ForestModel& forest,
                                                          const ScoreTable& scores,
                                                          const FeatureMatrix& x,
                                                          std::span<const std::size_t> positions,
                                                          const FeatureMatrix& background,
                                                          const ShapleyMode& mode);

// Per-cluster 1% sample capped at `max_rows`.
std::vector<std::size_t> background_positions(std::span<const std::int32_t> labels,
                                              std::uint64_t seed, double fraction = 0.01,
                                              std::size_t max_rows = 512);

nlohmann::json to_json(const AttributionVector& a);
void write_importance_csv(std::ostream& out, std::span<const FeatureImportance> summary);

}  // namespace procaudit
