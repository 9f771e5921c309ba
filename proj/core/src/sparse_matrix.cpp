#include "rbkit/sparse_matrix.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace rbkit {

namespace {

void check_index_range(std::size_t n_cols) {
  if (n_cols > std::numeric_limits<Index>::max()) {
    throw std::invalid_argument("SparseMatrix: column count exceeds 32-bit index range");
  }
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(n_rows + 1, 0) {
  check_index_range(n_cols);
}

SparseMatrix SparseMatrix::from_csr(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<std::size_t> row_ptr,
                                    std::vector<Index> col_idx, std::vector<double> values) {
  check_index_range(n_cols);
  if (row_ptr.size() != n_rows + 1) {
    throw std::invalid_argument("SparseMatrix: row_ptr must have n_rows + 1 entries");
  }
  if (col_idx.size() != values.size()) {
    throw std::invalid_argument("SparseMatrix: col_idx and values differ in length");
  }
  if (row_ptr.front() != 0 || row_ptr.back() != values.size()) {
    throw std::invalid_argument("SparseMatrix: row_ptr must start at 0 and end at nnz");
  }
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) {
      throw std::invalid_argument("SparseMatrix: row_ptr decreases at row " + std::to_string(i));
    }
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] >= n_cols) {
        throw std::invalid_argument("SparseMatrix: column index out of range in row " +
                                    std::to_string(i));
      }
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1]) {
        throw std::invalid_argument("SparseMatrix: columns not strictly increasing in row " +
                                    std::to_string(i));
      }
    }
  }
  SparseMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<Triplet> entries) {
  check_index_range(n_cols);
  for (const auto& e : entries) {
    if (e.row >= n_rows || e.col >= n_cols) {
      throw std::invalid_argument("SparseMatrix: triplet outside matrix shape");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<std::size_t> row_ptr(n_rows + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
      values.back() += e.value;
      continue;
    }
    col_idx.push_back(static_cast<Index>(e.col));
    values.push_back(e.value);
    ++row_ptr[e.row + 1];
  }
  for (std::size_t i = 0; i < n_rows; ++i) row_ptr[i + 1] += row_ptr[i];

  SparseMatrix m;
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  return m;
}

SparseMatrix SparseMatrix::from_dense(const RowMatrix& dense, bool drop_zeros) {
  check_index_range(dense.cols());
  SparseMatrix m(dense.rows(), dense.cols());
  if (!drop_zeros) {
    m.col_idx_.reserve(dense.rows() * dense.cols());
    m.values_.reserve(dense.rows() * dense.cols());
  }
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    const auto row = dense.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (drop_zeros && row[j] == 0.0) continue;
      m.col_idx_.push_back(static_cast<Index>(j));
      m.values_.push_back(row[j]);
    }
    m.row_ptr_[i + 1] = m.values_.size();
  }
  return m;
}

std::vector<double> SparseMatrix::matvec(std::span<const double> x) const {
  std::vector<double> out(n_rows_);
  matvec(x, out);
  return out;
}

void SparseMatrix::matvec(std::span<const double> x, std::span<double> out) const {
  if (x.size() != n_cols_ || out.size() != n_rows_) {
    throw std::invalid_argument("SparseMatrix::matvec: dimension mismatch (x has " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(n_cols_) + ")");
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
    out[i] = acc;
  }
}

std::vector<double> SparseMatrix::matvec_transpose(std::span<const double> y) const {
  std::vector<double> out(n_cols_);
  matvec_transpose(y, out);
  return out;
}

void SparseMatrix::matvec_transpose(std::span<const double> y, std::span<double> out) const {
  if (y.size() != n_rows_ || out.size() != n_cols_) {
    throw std::invalid_argument("SparseMatrix::matvec_transpose: dimension mismatch (y has " +
                                std::to_string(y.size()) + ", expected " +
                                std::to_string(n_rows_) + ")");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out[col_idx_[k]] += values_[k] * yi;
  }
}

ColumnView SparseMatrix::column_view() const { return ColumnView(*this); }

RowMatrix SparseMatrix::to_dense() const {
  RowMatrix out(n_rows_, n_cols_);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out(i, col_idx_[k]) = values_[k];
  }
  return out;
}

std::size_t SparseMatrix::byte_size() const {
  return row_ptr_.size() * sizeof(std::size_t) + col_idx_.size() * sizeof(Index) +
         values_.size() * sizeof(double);
}

ColumnView::ColumnView(const SparseMatrix& source)
    : n_rows_(source.rows()),
      n_cols_(source.cols()),
      col_ptr_(source.cols() + 1, 0),
      row_idx_(source.nnz()),
      values_(source.nnz()) {
  const auto& cols = source.col_idx();
  for (const Index c : cols) ++col_ptr_[c + 1];
  for (std::size_t j = 0; j < n_cols_; ++j) col_ptr_[j + 1] += col_ptr_[j];

  std::vector<std::size_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
  const auto& rp = source.row_ptr();
  const auto& vals = source.values();
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t dst = cursor[cols[k]]++;
      row_idx_[dst] = static_cast<Index>(i);
      values_[dst] = vals[k];
    }
  }
}

double ColumnView::squared_norm(std::size_t j) const {
  double acc = 0.0;
  for (const double v : column_values(j)) acc += v * v;
  return acc;
}

SparseMatrix ColumnView::to_row_major() const {
  std::vector<std::size_t> row_ptr(n_rows_ + 1, 0);
  for (const Index r : row_idx_) ++row_ptr[r + 1];
  for (std::size_t i = 0; i < n_rows_; ++i) row_ptr[i + 1] += row_ptr[i];

  std::vector<Index> col_idx(values_.size());
  std::vector<double> values(values_.size());
  std::vector<std::size_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
  for (std::size_t j = 0; j < n_cols_; ++j) {
    for (std::size_t k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
      const std::size_t dst = cursor[row_idx_[k]]++;
      col_idx[dst] = static_cast<Index>(j);
      values[dst] = values_[k];
    }
  }
  return SparseMatrix::from_csr(n_rows_, n_cols_, std::move(row_ptr), std::move(col_idx),
                                std::move(values));
}

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'B', 'K', 'C', 'S', 'R', '0', '1'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&v, bytes.data(), sizeof(T));
  }
  return v;
}

template <typename Disk, typename T>
void write_array(std::ofstream& out, const std::vector<T>& values) {
  for (const T& v : values) {
    const Disk d = to_little(static_cast<Disk>(v));
    out.write(reinterpret_cast<const char*>(&d), sizeof(Disk));
  }
}

template <typename Disk, typename T>
std::vector<T> read_array(std::ifstream& in, std::size_t count) {
  std::vector<T> values(count);
  for (auto& v : values) {
    Disk d;
    if (!in.read(reinterpret_cast<char*>(&d), sizeof(Disk))) {
      throw std::runtime_error("load_binary: truncated array");
    }
    v = static_cast<T>(to_little(d));
  }
  return values;
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw std::runtime_error("load_binary: truncated header");
  }
  return to_little(v);
}

}  // namespace

void save_binary(const SparseMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_binary: cannot open " + path.string());
  out.write(kMagic.data(), kMagic.size());
  for (const std::uint64_t v : {std::uint64_t{matrix.rows()}, std::uint64_t{matrix.cols()},
                                std::uint64_t{matrix.nnz()}}) {
    const auto le = to_little(v);
    out.write(reinterpret_cast<const char*>(&le), sizeof le);
  }
  write_array<std::uint64_t>(out, matrix.row_ptr());
  write_array<std::uint32_t>(out, matrix.col_idx());
  write_array<double>(out, matrix.values());
  if (!out) throw std::runtime_error("save_binary: write failed for " + path.string());
}

SparseMatrix load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_binary: cannot open " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error("load_binary: bad magic in " + path.string());
  }
  const auto n_rows = read_u64(in);
  const auto n_cols = read_u64(in);
  const auto nnz = read_u64(in);
  auto row_ptr = read_array<std::uint64_t, std::size_t>(in, n_rows + 1);
  auto col_idx = read_array<std::uint32_t, Index>(in, nnz);
  auto values = read_array<double, double>(in, nnz);
  return SparseMatrix::from_csr(n_rows, n_cols, std::move(row_ptr), std::move(col_idx),
                                std::move(values));
}

}  // namespace rbkit
