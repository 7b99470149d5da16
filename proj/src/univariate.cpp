#include "procaudit/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "procaudit/stats.hpp"

namespace procaudit {

std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::Iqr: return "iqr";
    case Detector::ZScore: return "zscore";
    case Detector::Dbscan: return "dbscan";
  }
  return "iqr";
}

std::vector<bool> iqr_flags(std::span<const double> col, std::vector<std::string>* warnings) {
  std::vector<bool> flags(col.size(), false);
  if (col.size() < 4) {
    if (warnings) warnings->push_back("IQR needs at least 4 values; column left unflagged");
    return flags;
  }
  std::vector<double> sorted(col.begin(), col.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = stats::quantile_linear_sorted(sorted, 0.25);
  const double q3 = stats::quantile_linear_sorted(sorted, 0.75);
  const double iqr = q3 - q1;
  const double lower = q1 - 1.5 * iqr;
  const double upper = q3 + 1.5 * iqr;
  for (std::size_t i = 0; i < col.size(); ++i) flags[i] = col[i] < lower || col[i] > upper;
  return flags;
}

std::vector<bool> zscore_flags(std::span<const double> col, double threshold) {
  std::vector<bool> flags(col.size(), false);
  if (col.empty() || stats::all_equal(col)) return flags;
  const double mu = stats::mean(col);
  const double sd = stats::population_std(col);
  if (sd == 0.0) return flags;
  for (std::size_t i = 0; i < col.size(); ++i) flags[i] = std::abs(col[i] - mu) / sd > threshold;
  return flags;
}

std::vector<bool> dbscan1d_flags(std::span<const double> col, double eps,
                                 std::size_t min_neighbors) {
  const std::size_t n = col.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
  std::vector<double> v(n);
  for (std::size_t p = 0; p < n; ++p) v[p] = col[order[p]];

  // fl(b - a) is monotone in b, so each eps-neighbourhood is a contiguous
  // window [lo, hi] of the sorted values under the same |a - b| <= eps test.
  std::vector<std::size_t> lo(n), hi(n);
  std::size_t l = 0, h = 0;
  for (std::size_t p = 0; p < n; ++p) {
    while (std::abs(v[p] - v[l]) > eps) ++l;
    if (h < p) h = p;
    while (h + 1 < n && std::abs(v[h + 1] - v[p]) <= eps) ++h;
    lo[p] = l;
    hi[p] = h;
  }

  std::vector<std::size_t> core_prefix(n + 1, 0);
  std::vector<bool> core(n);
  for (std::size_t p = 0; p < n; ++p) {
    core[p] = hi[p] - lo[p] >= min_neighbors;
    core_prefix[p + 1] = core_prefix[p] + (core[p] ? 1 : 0);
  }

  std::vector<bool> flags(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    if (core[p]) continue;
    const bool border = core_prefix[hi[p] + 1] - core_prefix[lo[p]] > 0;
    flags[order[p]] = !border;
  }
  return flags;
}

UnivariateFlagTable::UnivariateFlagTable(std::size_t rows, std::vector<std::string> features,
                                         std::vector<std::int64_t> row_ids)
    : rows_(rows), features_(std::move(features)), row_ids_(std::move(row_ids)) {
  for (auto& c : cells_) c.assign(rows_ * features_.size(), 0);
}

void UnivariateFlagTable::set_column(Detector d, std::size_t feature,
                                     const std::vector<bool>& flags) {
  for (std::size_t r = 0; r < rows_; ++r) set(d, r, feature, flags[r]);
}

std::size_t UnivariateFlagTable::count(Detector d) const {
  const auto& c = cells_[index(d)];
  return static_cast<std::size_t>(std::count(c.begin(), c.end(), 1));
}

UnivariateFlagTable detect_univariate(const FeatureMatrix& normalized,
                                      const UnivariateParams& params,
                                      std::vector<std::string>* warnings) {
  UnivariateFlagTable table(normalized.rows(), normalized.names(), normalized.row_ids());
  for (std::size_t f = 0; f < normalized.cols(); ++f) {
    const auto col = normalized.column(f);
    std::vector<std::string> local;
    table.set_column(Detector::Iqr, f, iqr_flags(col, &local));
    table.set_column(Detector::ZScore, f, zscore_flags(col, params.z_threshold));
    table.set_column(Detector::Dbscan, f,
                     dbscan1d_flags(col, params.dbscan_eps, params.dbscan_min_neighbors));
    if (warnings) {
      for (auto& w : local) warnings->push_back(normalized.names()[f] + ": " + w);
    }
  }
  return table;
}

std::vector<bool> univariate_union(const UnivariateFlagTable& table) {
  std::vector<bool> out(table.rows(), false);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t f = 0; f < table.features(); ++f) {
      if (table.get(Detector::ZScore, r, f) || table.get(Detector::Dbscan, r, f)) {
        out[r] = true;
        break;
      }
    }
  }
  return out;
}

UnivariateSummary summarize(std::string encoding, const UnivariateFlagTable& table) {
  UnivariateSummary s;
  s.encoding = std::move(encoding);
  s.total = table.rows();
  const auto u = univariate_union(table);
  s.outliers = static_cast<std::size_t>(std::count(u.begin(), u.end(), true));
  s.normal = s.total - s.outliers;
  for (auto d : kAllDetectors) s.flagged_cells[static_cast<std::size_t>(d)] = table.count(d);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t f = 0; f < table.features(); ++f) {
      if (table.get(Detector::Iqr, r, f)) {
        ++s.iqr_rows;
        break;
      }
    }
  }
  return s;
}

nlohmann::json to_json(const UnivariateSummary& s) {
  return {{"encoding", s.encoding},
          {"univariate_outliers", s.outliers},
          {"normal", s.normal},
          {"total", s.total},
          {"iqr_rows_not_in_union_rule", s.iqr_rows},
          {"flagged_cells",
           {{"iqr", s.flagged_cells[0]}, {"zscore", s.flagged_cells[1]},
            {"dbscan", s.flagged_cells[2]}}}};
}

void write_flag_table_csv(std::ostream& out, const UnivariateFlagTable& table) {
  out << "row_id,feature,detector,flagged\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t f = 0; f < table.features(); ++f) {
      for (auto d : kAllDetectors) {
        if (table.get(d, r, f)) {
          out << table.row_ids()[r] << ',' << table.feature_names()[f] << ',' << to_string(d)
              << ",1\n";
        }
      }
    }
  }
}

}  // namespace procaudit
