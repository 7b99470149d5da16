#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "procaudit/feature_matrix.hpp"

namespace procaudit {

struct UnivariateParams {
  double z_threshold = 2.5;
  double dbscan_eps = 1.0;
  std::size_t dbscan_min_neighbors = 3;
};

enum class Detector { Iqr, ZScore, Dbscan };
inline constexpr std::array<Detector, 3> kAllDetectors = {Detector::Iqr, Detector::ZScore,
                                                          Detector::Dbscan};
std::string_view to_string(Detector d);

// Outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR], quartiles by linear interpolation.
// Fewer than four values: nothing flagged and a warning is appended.
std::vector<bool> iqr_flags(std::span<const double> col,
                            std::vector<std::string>* warnings = nullptr);

// |v - mean| / population std > threshold; a constant column flags nothing.
std::vector<bool> zscore_flags(std::span<const double> col, double threshold = 2.5);

// One-dimensional DBSCAN noise. A core value has at least `min_neighbors`
// other values within eps (inclusive); a border value lies within eps of a
// core value; everything else is flagged. O(n log n).
std::vector<bool> dbscan1d_flags(std::span<const double> col, double eps = 1.0,
                                 std::size_t min_neighbors = 3);

class UnivariateFlagTable {
 public:
  UnivariateFlagTable() = default;
  UnivariateFlagTable(std::size_t rows, std::vector<std::string> features,
                      std::vector<std::int64_t> row_ids);

  std::size_t rows() const { return rows_; }
  std::size_t features() const { return features_.size(); }
  const std::vector<std::string>& feature_names() const { return features_; }
  const std::vector<std::int64_t>& row_ids() const { return row_ids_; }

  bool get(Detector d, std::size_t row, std::size_t feature) const {
    return cells_[index(d)][row * features() + feature] != 0;
  }
  void set(Detector d, std::size_t row, std::size_t feature, bool value) {
    cells_[index(d)][row * features() + feature] = value ? 1 : 0;
  }
  void set_column(Detector d, std::size_t feature, const std::vector<bool>& flags);

  std::size_t count(Detector d) const;

 private:
  static std::size_t index(Detector d) { return static_cast<std::size_t>(d); }

  std::size_t rows_ = 0;
  std::vector<std::string> features_;
  std::vector<std::int64_t> row_ids_;
  std::array<std::vector<std::uint8_t>, 3> cells_;
};

// Runs all three detectors on every column of a normalized matrix.
UnivariateFlagTable detect_univariate(const FeatureMatrix& normalized,
                                      const UnivariateParams& params = {},
                                      std::vector<std::string>* warnings = nullptr);

// Per row: z-score or DBSCAN on at least one feature. IQR does not count.
std::vector<bool> univariate_union(const UnivariateFlagTable& table);

struct UnivariateSummary {
  std::string encoding;
  std::size_t outliers = 0;
  std::size_t normal = 0;
  std::size_t total = 0;
  std::size_t iqr_rows = 0;
  std::array<std::size_t, 3> flagged_cells{};
};

UnivariateSummary summarize(std::string encoding, const UnivariateFlagTable& table);
nlohmann::json to_json(const UnivariateSummary& s);

// Flagged cells only: row_id,feature,detector,flagged.
void write_flag_table_csv(std::ostream& out, const UnivariateFlagTable& table);

}  // namespace procaudit
