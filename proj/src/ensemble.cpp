#include "procaudit/ensemble.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "procaudit/csv.hpp"
#include "procaudit/error.hpp"

namespace procaudit {

std::vector<bool> kmeans_anomaly_flags(const ClusterModel& m, double min_fraction) {
  const auto sizes = m.cluster_sizes();
  const double limit = min_fraction * static_cast<double>(m.assignments.size());
  std::vector<bool> out(m.assignments.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(sizes[static_cast<std::size_t>(m.assignments[i])]) < limit;
  }
  return out;
}

std::vector<bool> silhouette_anomaly_flags(const SilhouetteReport& r) {
  if (r.sampled) {
    throw DataError("silhouette flags need per-row coverage; the report is sampled");
  }
  std::vector<bool> out(r.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r.values[i] < 0.0;
  return out;
}

std::vector<AnomalyScorecard> build_scorecards(const std::vector<bool>& kmeans,
                                               const std::vector<bool>& silhouette,
                                               const std::vector<bool>& iforest,
                                               const std::vector<bool>& univariate,
                                               std::span<const std::int64_t> row_ids,
                                               std::span<const double> silhouette_values,
                                               std::span<const double> predictions) {
  const std::size_t n = kmeans.size();
  if (silhouette.size() != n || iforest.size() != n || univariate.size() != n ||
      (!row_ids.empty() && row_ids.size() != n) ||
      (!silhouette_values.empty() && silhouette_values.size() != n) ||
      (!predictions.empty() && predictions.size() != n)) {
    throw DataError("scorecard inputs have mismatched lengths");
  }
  std::vector<AnomalyScorecard> cards(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = cards[i];
    c.position = i;
    c.row_id = row_ids.empty() ? static_cast<std::int64_t>(i) : row_ids[i];
    c.flags = {kmeans[i], silhouette[i], iforest[i], univariate[i]};
    c.priority = c.flags.count();
    if (!silhouette_values.empty()) c.silhouette = silhouette_values[i];
    if (!predictions.empty()) c.prediction = predictions[i];
  }
  return cards;
}

std::string_view to_string(SecondaryOrder o) {
  switch (o) {
    case SecondaryOrder::SilhouetteAsc: return "silhouette_asc";
    case SecondaryOrder::IforestDesc: return "iforest_desc";
    case SecondaryOrder::RowId: return "row_id";
  }
  return "row_id";
}

std::vector<AnomalyScorecard> prioritise(std::vector<AnomalyScorecard> cards,
                                         SecondaryOrder order) {
  std::sort(cards.begin(), cards.end(), [order](const auto& a, const auto& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    if (order == SecondaryOrder::SilhouetteAsc && a.silhouette != b.silhouette) {
      return a.silhouette < b.silhouette;
    }
    if (order == SecondaryOrder::IforestDesc && a.prediction != b.prediction) {
      return a.prediction > b.prediction;
    }
    return a.row_id < b.row_id;
  });
  return cards;
}

std::size_t PriorityGroupTable::total() const {
  std::size_t t = 0;
  for (const auto& g : groups) t += g.total;
  return t;
}

PriorityGroupTable group_distribution(std::span<const AnomalyScorecard> cards,
                                      std::span<const std::int32_t> assignments,
                                      std::size_t clusters) {
  PriorityGroupTable t;
  t.clusters = clusters;
  // Key sorts descending priority, then ascending combination code.
  std::map<std::pair<int, int>, PriorityGroup> by_key;
  for (const auto& c : cards) {
    if (c.position >= assignments.size()) throw DataError("scorecard has no cluster assignment");
    const auto cluster = static_cast<std::size_t>(assignments[c.position]);
    if (cluster >= clusters) throw DataError("cluster index out of range");
    auto& g = by_key[{-c.priority, c.flags.code()}];
    if (g.per_cluster.empty()) {
      g.priority = c.priority;
      g.flags = c.flags;
      g.per_cluster.assign(clusters, 0);
    }
    ++g.per_cluster[cluster];
    ++g.total;
  }
  for (auto& [_, g] : by_key) t.groups.push_back(std::move(g));
  return t;
}

namespace {

const char* yes_no(bool v) { return v ? "Yes" : "No"; }

}  // namespace

void write_group_table_csv(std::ostream& out, const PriorityGroupTable& t) {
  CsvRow header = {"priority", "kmeans_anomaly", "silhouette_anomaly", "iforest_anomaly",
                   "univariate_anomaly"};
  for (std::size_t c = 0; c < t.clusters; ++c) header.push_back("cluster_" + std::to_string(c));
  header.push_back("total");
  write_csv_row(out, header);
  for (const auto& g : t.groups) {
    CsvRow row = {std::to_string(g.priority), yes_no(g.flags.kmeans), yes_no(g.flags.silhouette),
                  yes_no(g.flags.iforest), yes_no(g.flags.univariate)};
    for (auto n : g.per_cluster) row.push_back(std::to_string(n));
    row.push_back(std::to_string(g.total));
    write_csv_row(out, row);
  }
}

nlohmann::json to_json(const PriorityGroupTable& t) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : t.groups) {
    groups.push_back({{"priority", g.priority},
                      {"kmeans", g.flags.kmeans},
                      {"silhouette", g.flags.silhouette},
                      {"iforest", g.flags.iforest},
                      {"univariate", g.flags.univariate},
                      {"per_cluster", g.per_cluster},
                      {"total", g.total}});
  }
  return {{"clusters", t.clusters}, {"groups", groups}, {"total", t.total()}};
}

void write_review_list_csv(std::ostream& out, std::span<const AnomalyScorecard> ordered,
                           std::span<const std::int32_t> assignments, const Dataset& d,
                           bool include_unflagged) {
  CsvRow header = {"row_id",     "priority", "kmeans_anomaly", "silhouette_anomaly",
                   "iforest_anomaly", "univariate_anomaly", "silhouette", "prediction",
                   "cluster"};
  for (const auto& c : d.schema.columns) header.push_back(c.name);
  write_csv_row(out, header);

  std::map<std::int64_t, const TransactionRecord*> by_id;
  for (const auto& rec : d.records) by_id[rec.row_id] = &rec;

  for (const auto& c : ordered) {
    if (c.priority == 0 && !include_unflagged) continue;
    CsvRow row = {std::to_string(c.row_id),
                  std::to_string(c.priority),
                  c.flags.kmeans ? "1" : "0",
                  c.flags.silhouette ? "1" : "0",
                  c.flags.iforest ? "1" : "0",
                  c.flags.univariate ? "1" : "0",
                  format_double(c.silhouette),
                  format_double(c.prediction),
                  std::to_string(assignments[c.position])};
    const auto it = by_id.find(c.row_id);
    for (const auto& col : d.schema.columns) {
      if (it == by_id.end()) {
        row.emplace_back();
      } else if (col.name == kAmountColumn) {
        row.push_back(it->second->amount ? format_double(*it->second->amount) : "");
      } else {
        row.push_back(*it->second->text(col.name));
      }
    }
    write_csv_row(out, row);
  }
}

}  // namespace procaudit
