#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "procaudit/feature_matrix.hpp"
#include "procaudit/ingest.hpp"
#include "procaudit/rng.hpp"

namespace testutil {

// Records with the given vendors and amounts; every other column holds "x".
inline procaudit::Dataset vendor_dataset(const std::vector<std::string>& vendors,
                                         const std::vector<double>& amounts) {
  procaudit::Dataset d;
  d.schema = procaudit::Schema::standard();
  for (std::size_t i = 0; i < vendors.size(); ++i) {
    procaudit::TransactionRecord r;
    r.row_id = r.source_row = static_cast<std::int64_t>(i);
    for (const auto& c : d.schema.columns) {
      if (auto* t = r.text(c.name)) *t = "x";
    }
    r.order_id = "PO" + std::to_string(i);
    r.item_id = "IT" + std::to_string(i);
    r.vendor_code = vendors[i];
    r.amount = amounts[i];
    d.records.push_back(r);
  }
  return d;
}

inline procaudit::FeatureMatrix matrix(const std::vector<std::vector<double>>& rows) {
  std::vector<std::string> names;
  for (std::size_t f = 0; f < rows.at(0).size(); ++f) names.push_back("f" + std::to_string(f));
  procaudit::FeatureMatrix x(rows.size(), names);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row_ids()[r] = static_cast<std::int64_t>(r);
    for (std::size_t f = 0; f < rows[r].size(); ++f) x.at(r, f) = rows[r][f];
  }
  return x;
}

inline std::vector<std::vector<double>> rows_of(const procaudit::FeatureMatrix& x) {
  std::vector<std::vector<double>> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r].assign(x.row(r).begin(), x.row(r).end());
  return out;
}

// Isotropic Gaussian blobs centred at (spacing * c, spacing * c, ...).
inline procaudit::FeatureMatrix blobs(std::size_t n, std::size_t k, std::size_t dims,
                                      double spacing, double spread, std::uint64_t seed,
                                      std::vector<int>* truth = nullptr) {
  procaudit::Rng rng(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = i % k;
    std::vector<double> p(dims);
    for (std::size_t f = 0; f < dims; ++f) {
      p[f] = spacing * static_cast<double>(c) * (f % 2 == 0 ? 1.0 : -1.0) + spread * rng.normal();
    }
    rows.push_back(p);
    if (truth) truth->push_back(static_cast<int>(c));
  }
  return matrix(rows);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("procaudit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
