#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace procaudit {

// Dense row-major matrix of finite doubles with feature names and the
// row_id of the transaction each row came from.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::vector<std::string> names);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }
  std::vector<double> column(std::size_t c) const;

  const std::vector<std::string>& names() const { return names_; }
  std::vector<std::int64_t>& row_ids() { return row_ids_; }
  const std::vector<std::int64_t>& row_ids() const { return row_ids_; }
  std::span<const double> data() const { return data_; }

  // Rows at the given positions, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> positions) const;
  bool all_finite() const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<std::int64_t> row_ids_;
  std::vector<double> data_;
};

// Column-major copy used by the distance kernels: column f occupies
// [f * rows, (f + 1) * rows).
class ColumnBlock {
 public:
  ColumnBlock() = default;
  explicit ColumnBlock(const FeatureMatrix& x);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const double* data() const { return data_.data(); }
  const double* column(std::size_t f) const { return data_.data() + f * rows_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace procaudit
