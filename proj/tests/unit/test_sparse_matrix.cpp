#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rbkit/sparse_matrix.hpp"

using rbkit::SparseMatrix;
using rbkit::Triplet;

namespace {

SparseMatrix identity(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return SparseMatrix::from_triplets(n, n, t);
}

// [[0,2],[3,0]]
SparseMatrix swap_matrix() { return SparseMatrix::from_triplets(2, 2, {{0, 1, 2.0}, {1, 0, 3.0}}); }

std::vector<double> dense_matvec(const rbkit::RowMatrix& a, const std::vector<double>& x) {
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
  }
  return out;
}

}  // namespace

TEST(Matvec, IdentityReturnsInput) {
  EXPECT_EQ(identity(3).matvec(std::vector<double>{1, 2, 3}), (std::vector<double>{1, 2, 3}));
}

TEST(Matvec, ZeroMatrixAnnihilates) {
  EXPECT_EQ(SparseMatrix(2, 4).matvec(std::vector<double>{1, 1, 1, 1}),
            (std::vector<double>{0, 0}));
}

TEST(Matvec, SmallHandExample) {
  EXPECT_EQ(swap_matrix().matvec(std::vector<double>{1, 1}), (std::vector<double>{2, 3}));
}

TEST(Matvec, DimensionMismatchThrows) {
  EXPECT_THROW(identity(3).matvec(std::vector<double>{1, 2}), std::invalid_argument);
  std::vector<double> out(2);
  EXPECT_THROW(identity(3).matvec(std::vector<double>{1, 2, 3}, out), std::invalid_argument);
}

TEST(MatvecTranspose, IdentityReturnsInput) {
  EXPECT_EQ(identity(3).matvec_transpose(std::vector<double>{4, 5, 6}),
            (std::vector<double>{4, 5, 6}));
}

TEST(MatvecTranspose, SmallHandExample) {
  EXPECT_EQ(swap_matrix().matvec_transpose(std::vector<double>{1, 1}),
            (std::vector<double>{3, 2}));
}

TEST(MatvecTranspose, SingleRowBroadcasts) {
  const auto a = SparseMatrix::from_triplets(1, 3, {{0, 0, 1.0}, {0, 1, 1.0}, {0, 2, 1.0}});
  EXPECT_EQ(a.matvec_transpose(std::vector<double>{2}), (std::vector<double>{2, 2, 2}));
}

TEST(MatvecTranspose, DimensionMismatchThrows) {
  EXPECT_THROW(swap_matrix().matvec_transpose(std::vector<double>{1, 2, 3}),
               std::invalid_argument);
}

TEST(ColumnView, IdentityColumns) {
  const auto view = identity(2).column_view();
  ASSERT_EQ(view.cols(), 2u);
  ASSERT_EQ(view.column_nnz(0), 1u);
  EXPECT_EQ(view.column_rows(0)[0], 0u);
  EXPECT_EQ(view.column_values(0)[0], 1.0);
  ASSERT_EQ(view.column_nnz(1), 1u);
  EXPECT_EQ(view.column_rows(1)[0], 1u);
  EXPECT_EQ(view.column_values(1)[0], 1.0);
}

TEST(ColumnView, TransposeByHand) {
  const auto view = swap_matrix().column_view();
  ASSERT_EQ(view.column_nnz(0), 1u);
  EXPECT_EQ(view.column_rows(0)[0], 1u);
  EXPECT_EQ(view.column_values(0)[0], 3.0);
  ASSERT_EQ(view.column_nnz(1), 1u);
  EXPECT_EQ(view.column_rows(1)[0], 0u);
  EXPECT_EQ(view.column_values(1)[0], 2.0);
  EXPECT_DOUBLE_EQ(view.squared_norm(0), 9.0);
}

TEST(ColumnView, EmptyMatrixHasEmptyColumns) {
  const auto view = SparseMatrix(3, 3).column_view();
  ASSERT_EQ(view.cols(), 3u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(view.column_nnz(j), 0u);
}

TEST(SparseMatrixConstruction, TripletsAreSortedAndSummed) {
  const auto a = SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 4.0}, {0, 1, 3.0}});
  EXPECT_EQ(a.nnz(), 3u);
  EXPECT_EQ(a.row_ptr(), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(a.col_idx(), (std::vector<rbkit::Index>{1, 0, 2}));
  EXPECT_EQ(a.values(), (std::vector<double>{5.0, 4.0, 1.0}));
}

TEST(SparseMatrixConstruction, CsrValidation) {
  EXPECT_NO_THROW(SparseMatrix::from_csr(2, 2, {0, 1, 2}, {1, 0}, {1.0, 1.0}));
  // unsorted row
  EXPECT_THROW(SparseMatrix::from_csr(1, 3, {0, 2}, {2, 0}, {1.0, 1.0}), std::invalid_argument);
  // duplicate column
  EXPECT_THROW(SparseMatrix::from_csr(1, 3, {0, 2}, {1, 1}, {1.0, 1.0}), std::invalid_argument);
  // column out of range
  EXPECT_THROW(SparseMatrix::from_csr(1, 2, {0, 1}, {2}, {1.0}), std::invalid_argument);
  // row_ptr does not start at 0 / end at nnz / decreases
  EXPECT_THROW(SparseMatrix::from_csr(1, 2, {1, 1}, {0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix::from_csr(2, 2, {0, 2, 1}, {0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix::from_csr(2, 2, {0, 1}, {0}, {1.0}), std::invalid_argument);
}

TEST(SparseMatrixConstruction, DenseRoundTrip) {
  rbkit::RowMatrix d(2, 3, std::vector<double>{0, 1, 0, 2, 0, 3});
  const auto sparse = SparseMatrix::from_dense(d, true);
  EXPECT_EQ(sparse.nnz(), 3u);
  EXPECT_EQ(sparse.to_dense(), d);
  EXPECT_EQ(SparseMatrix::from_dense(d).nnz(), 6u);
}

TEST(SparseMatrixProperties, MatvecMatchesDenseOracle) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + gen() % 40;
    const std::size_t cols = 1 + gen() % 40;
    const auto a = oracle::random_sparse(rows, cols, 0.2, gen);
    std::vector<double> x(cols);
    for (auto& v : x) v = normal(gen);
    const auto expected = dense_matvec(a.to_dense(), x);
    const auto got = a.matvec(x);
    for (std::size_t i = 0; i < rows; ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
  }
}

TEST(SparseMatrixProperties, AdjointIdentity) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + gen() % 60;
    const std::size_t cols = 1 + gen() % 60;
    const auto a = oracle::random_sparse(rows, cols, 0.3, gen);
    std::vector<double> x(cols);
    std::vector<double> y(rows);
    for (auto& v : x) v = normal(gen);
    for (auto& v : y) v = normal(gen);
    const auto ax = a.matvec(x);
    const auto aty = a.matvec_transpose(y);
    double lhs = 0.0;
    double rhs = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      lhs += aty[j] * x[j];
      scale += std::abs(aty[j] * x[j]);
    }
    for (std::size_t i = 0; i < rows; ++i) rhs += y[i] * ax[i];
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, scale));
  }
}

TEST(SparseMatrixProperties, ColumnViewRoundTripsBitExactly) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = oracle::random_sparse(1 + gen() % 50, 1 + gen() % 50, 0.15, gen);
    const auto view = a.column_view();
    EXPECT_EQ(view.nnz(), a.nnz());
    EXPECT_EQ(view.to_row_major(), a);
  }
}

TEST(SparseMatrixIo, BinaryRoundTrip) {
  std::mt19937_64 gen(14);
  const auto a = oracle::random_sparse(17, 9, 0.3, gen);
  const auto path = std::filesystem::temp_directory_path() / "rbkit_csr_roundtrip.bin";
  rbkit::save_binary(a, path);
  EXPECT_EQ(rbkit::load_binary(path), a);
  std::filesystem::remove(path);
}

TEST(SparseMatrixIo, RejectsWrongMagic) {
  const auto path = std::filesystem::temp_directory_path() / "rbkit_csr_bad.bin";
  std::ofstream(path, std::ios::binary) << "NOTACSR!garbage";
  EXPECT_THROW(rbkit::load_binary(path), std::runtime_error);
  std::filesystem::remove(path);
}
