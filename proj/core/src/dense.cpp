#include "rbkit/dense.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rbkit {

RowMatrix::RowMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

RowMatrix::RowMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("RowMatrix: expected " + std::to_string(rows * cols) +
                                " values, got " + std::to_string(values_.size()));
  }
}

RowMatrix RowMatrix::select_rows(std::span<const std::size_t> indices) const {
  RowMatrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_) throw std::out_of_range("RowMatrix::select_rows: row index");
    const auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

}  // namespace rbkit
