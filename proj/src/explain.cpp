#include "procaudit/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>

#include "procaudit/clustering.hpp"
#include "procaudit/csv.hpp"
#include "procaudit/error.hpp"
#include "procaudit/rng.hpp"

namespace procaudit {

namespace {

std::vector<double> exact_shapley(const ScoringFunction& score, std::span<const double> row,
                                  std::span<const double> reference) {
  const std::size_t d = row.size();
  const std::size_t n_masks = std::size_t{1} << d;
  std::vector<double> value(n_masks);
  std::vector<double> z(d);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    for (std::size_t f = 0; f < d; ++f) z[f] = (mask >> f) & 1 ? row[f] : reference[f];
    value[mask] = score(z);
  }
  // weight[s] = s! (d - s - 1)! / d! = 1 / (d * C(d - 1, s))
  std::vector<double> weight(d);
  double binom = 1.0;
  for (std::size_t s = 0; s < d; ++s) {
    weight[s] = 1.0 / (static_cast<double>(d) * binom);
    binom = binom * static_cast<double>(d - 1 - s) / static_cast<double>(s + 1);
  }
  std::vector<double> phi(d, 0.0);
  for (std::size_t f = 0; f < d; ++f) {
    const std::size_t bit = std::size_t{1} << f;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      phi[f] += weight[s] * (value[mask | bit] - value[mask]);
    }
  }
  return phi;
}

std::vector<double> sampled_shapley(const ScoringFunction& score, std::span<const double> row,
                                    std::span<const double> reference, std::size_t n_perm,
                                    std::uint64_t seed) {
  const std::size_t d = row.size();
  Rng rng(seed);
  std::vector<double> phi(d, 0.0);
  std::vector<std::size_t> perm(d);
  std::vector<double> z(d);
  const double empty = score(reference);
  for (std::size_t p = 0; p < n_perm; ++p) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = d; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::copy(reference.begin(), reference.end(), z.begin());
    double prev = empty;
    for (auto f : perm) {
      z[f] = row[f];
      const double cur = score(z);
      phi[f] += cur - prev;
      prev = cur;
    }
  }
  for (auto& v : phi) v /= static_cast<double>(n_perm);
  return phi;
}

}  // namespace

AttributionVector shapley_attributions(const ScoringFunction& score, std::span<const double> row,
                                       std::span<const double> reference,
                                       std::vector<std::string> features, const ShapleyMode& mode) {
  if (reference.empty() || reference.size() != row.size()) {
    throw DataError("Shapley attribution needs a reference point of the row's width");
  }
  if (features.empty()) {
    for (std::size_t f = 0; f < row.size(); ++f) features.push_back("f" + std::to_string(f));
  }
  AttributionVector a;
  a.features = std::move(features);
  a.exact = mode.kind == ShapleyMode::Kind::Exact;
  if (a.exact) {
    if (row.size() > kMaxExactFeatures) {
      throw ConfigError("exact Shapley supports at most " + std::to_string(kMaxExactFeatures) +
                        " features");
    }
    a.values = exact_shapley(score, row, reference);
  } else {
    if (mode.n_permutations == 0) throw ConfigError("sampled Shapley needs permutations");
    a.values = sampled_shapley(score, row, reference, mode.n_permutations, mode.seed);
  }
  a.baseline = score(reference);
  a.prediction = score(row);
  a.reconstructed = a.baseline;
  for (double v : a.values) a.reconstructed += v;
  // Sampled orderings telescope to prediction - baseline as well.
  a.tolerance = 1e-9;
  return a;
}

std::vector<double> background_mean(const FeatureMatrix& background) {
  if (background.rows() == 0) throw DataError("background set is empty");
  std::vector<double> mean(background.cols(), 0.0);
  for (std::size_t r = 0; r < background.rows(); ++r) {
    const auto row = background.row(r);
    for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += row[f];
  }
  for (auto& m : mean) m /= static_cast<double>(background.rows());
  return mean;
}

ScoringFunction forest_scoring_function(const ForestModel& forest, double max_mean_path_length,
                                        double min_mean_path_length) {
  return [&forest, max_mean_path_length, min_mean_path_length](std::span<const double> z) {
    return normalized_prediction(forest, z, max_mean_path_length, min_mean_path_length);
  };
}

AttributionVector explain_row(const ForestModel& forest, const ScoreTable& scores,
                              const FeatureMatrix& x, std::size_t position,
                              const FeatureMatrix& background, const ShapleyMode& mode) {
  const auto reference = background_mean(background);
  auto f = forest_scoring_function(forest, scores.max_mean_path_length,
                                   scores.min_mean_path_length);
  auto a = shapley_attributions(f, x.row(position), reference, x.names(), mode);
  a.row_id = x.row_ids()[position];
  return a;
}

std::vector<std::pair<std::string, double>> top_contributors(const AttributionVector& a,
                                                             std::size_t n) {
  std::vector<std::size_t> idx(a.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
    return std::abs(a.values[l]) > std::abs(a.values[r]);
  });
  idx.resize(std::min(n, idx.size()));
  std::vector<std::pair<std::string, double>> out;
  for (auto i : idx) out.emplace_back(a.features[i], a.values[i]);
  return out;
}

std::vector<FeatureImportance> summarize_attributions(std::span<const AttributionVector> rows) {
  if (rows.empty()) throw DataError("attribution summary needs at least one row");
  const auto& features = rows.front().features;
  std::vector<double> acc(features.size(), 0.0);
  for (const auto& a : rows) {
    for (std::size_t f = 0; f < acc.size(); ++f) acc[f] += std::abs(a.values[f]);
  }
  std::vector<FeatureImportance> out;
  for (std::size_t f = 0; f < acc.size(); ++f) {
    out.push_back({features[f], acc[f] / static_cast<double>(rows.size())});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.mean_abs_attribution > r.mean_abs_attribution;
  });
  return out;
}

std::vector<FeatureImportance> global_attribution_summary(const ForestModel& forest,
                                                          const ScoreTable& scores,
                                                          const FeatureMatrix& x,
                                                          std::span<const std::size_t> positions,
                                                          const FeatureMatrix& background,
                                                          const ShapleyMode& mode) {
  if (positions.empty()) throw DataError("attribution summary needs at least one flagged row");
  std::vector<AttributionVector> rows;
  rows.reserve(positions.size());
  for (auto p : positions) {
    auto m = mode;
    m.seed = derive_seed(mode.seed, "shapley-row", static_cast<std::uint64_t>(x.row_ids()[p]));
    rows.push_back(explain_row(forest, scores, x, p, background, m));
  }
  return summarize_attributions(rows);
}

std::vector<std::size_t> background_positions(std::span<const std::int32_t> labels,
                                              std::uint64_t seed, double fraction,
                                              std::size_t max_rows) {
  auto sample = stratified_sample(labels, fraction, seed);
  if (sample.size() > max_rows) {
    Rng rng(derive_seed(seed, "background-cap"));
    for (std::size_t i = 0; i < max_rows; ++i) {
      std::swap(sample[i], sample[i + rng.below(sample.size() - i)]);
    }
    sample.resize(max_rows);
    std::sort(sample.begin(), sample.end());
  }
  return sample;
}

nlohmann::json to_json(const AttributionVector& a) {
  nlohmann::json contributions = nlohmann::json::array();
  for (std::size_t f = 0; f < a.values.size(); ++f) {
    contributions.push_back({{"feature", a.features[f]}, {"value", a.values[f]}});
  }
  return {{"row_id", a.row_id},
          {"baseline", a.baseline},
          {"prediction", a.prediction},
          {"reconstructed", a.reconstructed},
          {"tolerance", a.tolerance},
          {"mode", a.exact ? "exact" : "sampled"},
          {"contributions", contributions}};
}

void write_importance_csv(std::ostream& out, std::span<const FeatureImportance> summary) {
  out << "rank,feature,mean_abs_attribution\n";
  for (std::size_t i = 0; i < summary.size(); ++i) {
    out << i + 1 << ',' << csv_field(summary[i].feature) << ','
        << format_double(summary[i].mean_abs_attribution) << '\n';
  }
}

}  // namespace procaudit
