#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rbkit {

/// Dense row-major matrix of doubles. Used for raw inputs (N x d) and for
/// the dense feature matrices produced by the Fourier and Nystrom maps.
class RowMatrix {
 public:
  RowMatrix() = default;
  RowMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  RowMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

  const std::vector<double>& values() const { return values_; }

  /// Bytes held by the value array.
  std::size_t byte_size() const { return values_.size() * sizeof(double); }

  /// Copy of the rows listed in `indices`, in that order.
  RowMatrix select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const RowMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace rbkit
