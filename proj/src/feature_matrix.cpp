#include "procaudit/feature_matrix.hpp"

#include <cmath>
#include <numeric>

namespace procaudit {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<std::string> names)
    : rows_(rows), names_(std::move(names)), row_ids_(rows), data_(rows * names_.size(), 0.0) {
  std::iota(row_ids_.begin(), row_ids_.end(), 0);
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> positions) const {
  FeatureMatrix out(positions.size(), names_);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto src = row(positions[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
    out.row_ids_[i] = row_ids_[positions[i]];
  }
  return out;
}

bool FeatureMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ColumnBlock::ColumnBlock(const FeatureMatrix& x)
    : rows_(x.rows()), cols_(x.cols()), data_(x.rows() * x.cols()) {
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t f = 0; f < cols_; ++f) data_[f * rows_ + r] = x.at(r, f);
  }
}

}  // namespace procaudit
