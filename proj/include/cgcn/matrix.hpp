#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cgcn {

using Index = std::int32_t;

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Compressed sparse row matrix. Column indices are strictly increasing within
// each row; row_offsets has n_rows + 1 entries.
struct SparseMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::int64_t> row_offsets{0};
  std::vector<Index> col_indices;
  std::vector<double> values;

  std::size_t nnz() const { return col_indices.size(); }
  std::size_t row_nnz(std::size_t r) const {
    return static_cast<std::size_t>(row_offsets[r + 1] - row_offsets[r]);
  }
  std::span<const Index> row_cols(std::size_t r) const {
    return {col_indices.data() + row_offsets[r], row_nnz(r)};
  }
  std::span<const double> row_vals(std::size_t r) const {
    return {values.data() + row_offsets[r], row_nnz(r)};
  }
  // Stored value at (r, c), or 0 when absent.
  double at(std::size_t r, std::size_t c) const;

  static SparseMatrix zeros(std::size_t rows, std::size_t cols);
  static SparseMatrix identity(std::size_t n);

  // Throws InputError when any structural invariant is violated.
  void validate() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;
};

}  // namespace cgcn
