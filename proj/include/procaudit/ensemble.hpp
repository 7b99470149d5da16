#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "procaudit/clustering.hpp"
#include "procaudit/ingest.hpp"

namespace procaudit {

struct AnomalyFlags {
  bool kmeans = false;
  bool silhouette = false;
  bool iforest = false;
  bool univariate = false;

  int count() const { return int{kmeans} + int{silhouette} + int{iforest} + int{univariate}; }
  // kmeans is the most significant bit: ordering of flag combinations.
  int code() const {
    return (kmeans ? 8 : 0) | (silhouette ? 4 : 0) | (iforest ? 2 : 0) | (univariate ? 1 : 0);
  }
  bool operator==(const AnomalyFlags&) const = default;
};

struct AnomalyScorecard {
  std::int64_t row_id = 0;
  std::size_t position = 0;  // row index in the scored matrix
  AnomalyFlags flags;
  int priority = 0;
  double silhouette = 0.0;
  double prediction = 0.0;
};

// Rows of clusters holding fewer than min_fraction * n rows (strict).
std::vector<bool> kmeans_anomaly_flags(const ClusterModel& m, double min_fraction = 0.01);

// s(i) < 0. Requires per-row coverage, so sampled reports are rejected.
std::vector<bool> silhouette_anomaly_flags(const SilhouetteReport& r);


// priority = number of flags set. Tie-break keys may be empty (zeros).
std::vector<AnomalyScorecard> build_scorecards(const std::vector<bool>& kmeans,
                                               const std::vector<bool>& silhouette,
                                               const std::vector<bool>& iforest,
                                               const std::vector<bool>& univariate,
                                               std::span<const std::int64_t> row_ids = {},
                                               std::span<const double> silhouette_values = {},
                                               std::span<const double> predictions = {});

enum class SecondaryOrder { SilhouetteAsc, IforestDesc, RowId };
std::string_view to_string(SecondaryOrder o);

// Descending priority, then the secondary key, then row_id.
std::vector<AnomalyScorecard> prioritise(std::vector<AnomalyScorecard> cards, SecondaryOrder order);

struct PriorityGroup {
  int priority = 0;
  AnomalyFlags flags;
  std::vector<std::size_t> per_cluster;
  std::size_t total = 0;
};

struct PriorityGroupTable {
  std::size_t clusters = 0;
  // Descending priority, then ascending flag code; empty groups omitted.
  std::vector<PriorityGroup> groups;

  std::size_t total() const;
};

PriorityGroupTable group_distribution(std::span<const AnomalyScorecard> cards,
                                      std::span<const std::int32_t> assignments,
                                      std::size_t clusters);

void write_group_table_csv(std::ostream& out, const PriorityGroupTable& t);
nlohmann::json to_json(const PriorityGroupTable& t);

// Ordered review list joined back to the source transactions by position.
void write_review_list_csv(std::ostream& out, std::span<const AnomalyScorecard> ordered,
                           std::span<const std::int32_t> assignments, const Dataset& d,
                           bool include_unflagged = false);

}  // namespace procaudit
