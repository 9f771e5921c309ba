#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rbkit/dense.hpp"

namespace rbkit {

using Index = std::uint32_t;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

class ColumnView;

/// Compressed sparse row matrix in canonical form: column indices strictly
/// increasing within each row. Immutable once constructed.
class SparseMatrix {
 public:
  /// Zero matrix with the given shape.
  SparseMatrix(std::size_t n_rows = 0, std::size_t n_cols = 0);

  /// Adopts CSR arrays after checking every canonical-form invariant.
  /// Throws std::invalid_argument on violation.
  static SparseMatrix from_csr(std::size_t n_rows, std::size_t n_cols,
                               std::vector<std::size_t> row_ptr, std::vector<Index> col_idx,
                               std::vector<double> values);

  /// Builds from unordered entries; duplicates are summed.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> entries);

  /// Stores every entry of `dense`, zeros included, unless `drop_zeros`.
  static SparseMatrix from_dense(const RowMatrix& dense, bool drop_zeros = false);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::size_t row_nnz(std::size_t i) const { return row_ptr_[i + 1] - row_ptr_[i]; }
  std::span<const Index> row_cols(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_nnz(i)};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_nnz(i)};
  }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// A * x. Throws std::invalid_argument if x.size() != cols().
  std::vector<double> matvec(std::span<const double> x) const;
  void matvec(std::span<const double> x, std::span<double> out) const;

  /// A^T * y. Throws std::invalid_argument if y.size() != rows().
  std::vector<double> matvec_transpose(std::span<const double> y) const;
  void matvec_transpose(std::span<const double> y, std::span<double> out) const;

  ColumnView column_view() const;

  RowMatrix to_dense() const;

  /// Exact byte count of the three stored arrays.
  std::size_t byte_size() const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Column-major (CSC) copy of a SparseMatrix, built once per solver run.
/// Row indices within each column are increasing.
class ColumnView {
 public:
  explicit ColumnView(const SparseMatrix& source);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::size_t column_nnz(std::size_t j) const { return col_ptr_[j + 1] - col_ptr_[j]; }
  std::span<const Index> column_rows(std::size_t j) const {
    return {row_idx_.data() + col_ptr_[j], column_nnz(j)};
  }
  std::span<const double> column_values(std::size_t j) const {
    return {values_.data() + col_ptr_[j], column_nnz(j)};
  }

  double squared_norm(std::size_t j) const;

  /// Rebuilds the row-major matrix this view was derived from.
  SparseMatrix to_row_major() const;

 private:
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<std::size_t> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

// Binary CSR cache format (little-endian):
//   8 bytes  magic "RBKCSR01"
//   u64      n_rows, n_cols, nnz
//   u64      row_ptr[n_rows + 1]
//   u32      col_idx[nnz]
//   f64      values[nnz]
void save_binary(const SparseMatrix& matrix, const std::filesystem::path& path);
SparseMatrix load_binary(const std::filesystem::path& path);

}  // namespace rbkit
