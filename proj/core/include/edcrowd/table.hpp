#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace edcrowd {

// Read-only row-major view over a dense feature matrix.
class MatrixView {
 public:
  MatrixView() = default;
  MatrixView(std::span<const double> data, std::size_t rows, std::size_t cols)
      : data_(data.first(rows * cols)), rows_(rows), cols_(cols) {
    assert(data.size() >= rows * cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const { return data_.subspan(i * cols_, cols_); }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  // First n rows.
  MatrixView head(std::size_t n) const { return MatrixView(data_, n, cols_); }
  std::span<const double> data() const { return data_; }

 private:
  std::span<const double> data_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

struct FeatureTable {
  std::size_t cols = 0;
  std::vector<double> values;

  std::size_t rows() const { return cols == 0 ? 0 : values.size() / cols; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
  MatrixView view() const { return MatrixView(values, rows(), cols); }
};

}  // namespace edcrowd
