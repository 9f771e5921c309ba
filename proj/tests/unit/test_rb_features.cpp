#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "rbkit/kernels.hpp"
#include "rbkit/random.hpp"
#include "rbkit/rb_features.hpp"

using rbkit::KernelKind;
using rbkit::KernelSpec;
using rbkit::RbTransform;
using rbkit::RowMatrix;

namespace {

RbTransform fit(const RowMatrix& x, double sigma, std::size_t r, std::uint64_t seed) {
  rbkit::Rng rng(seed);
  return RbTransform::fit(x, {KernelKind::Laplacian, sigma, x.cols()}, r, rng);
}

}  // namespace

TEST(BinIndex, Origin) {
  EXPECT_EQ(rbkit::bin_index(std::vector<double>{0, 0}, std::vector<double>{1, 1},
                             std::vector<double>{0, 0}),
            (std::vector<std::int64_t>{0, 0}));
}

TEST(BinIndex, ShiftedPoint) {
  EXPECT_EQ(rbkit::bin_index(std::vector<double>{2.5}, std::vector<double>{1.0},
                             std::vector<double>{0.5}),
            (std::vector<std::int64_t>{2}));
}

TEST(BinIndex, NegativeFloors) {
  EXPECT_EQ(rbkit::bin_index(std::vector<double>{-0.1}, std::vector<double>{1.0},
                             std::vector<double>{0.0}),
            (std::vector<std::int64_t>{-1}));
}

TEST(BinIndex, NonFiniteInputThrows) {
  EXPECT_THROW(rbkit::bin_index(std::vector<double>{std::nan("")}, std::vector<double>{1.0},
                                std::vector<double>{0.0}),
               std::invalid_argument);
}

TEST(Grid, OffsetsMustLieInsideTheWidth) {
  EXPECT_THROW(rbkit::Grid({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(rbkit::Grid({1.0}, {-0.1}), std::invalid_argument);
  EXPECT_THROW(rbkit::Grid({0.0}, {0.0}), std::invalid_argument);
  EXPECT_NO_THROW(rbkit::Grid({1.0}, {0.999}));
}

TEST(Grid, SampledGridsRespectInvariants) {
  const rbkit::WidthDistribution dist({KernelKind::Laplacian, 0.3, 5});
  rbkit::Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const auto g = rbkit::Grid::sample(dist, rng);
    for (std::size_t j = 0; j < g.dim(); ++j) {
      EXPECT_GT(g.widths()[j], 0.0);
      EXPECT_GE(g.offsets()[j], 0.0);
      EXPECT_LT(g.offsets()[j], g.widths()[j]);
    }
  }
}

TEST(Grid, DictionaryKeepsFirstOccurrenceOrder) {
  rbkit::Grid g({1.0, 1.0}, {0.0, 0.0});
  const std::vector<std::int64_t> a{3, -2};
  const std::vector<std::int64_t> b{0, 0};
  EXPECT_EQ(g.insert(a), 0u);
  EXPECT_EQ(g.insert(b), 1u);
  EXPECT_EQ(g.insert(a), 0u);
  EXPECT_EQ(g.num_bins(), 2u);
  EXPECT_EQ(*g.find(b), 1u);
  EXPECT_FALSE(g.find(std::vector<std::int64_t>{1, 1}).has_value());
  // Enough keys to force rehashing.
  for (std::int64_t i = 0; i < 5000; ++i) g.insert(std::vector<std::int64_t>{i, -i});
  EXPECT_EQ(*g.find(a), 0u);
  EXPECT_EQ(*g.find(std::vector<std::int64_t>{4999, -4999}), 4999u + 2u - 1u);
}

TEST(RbFit, SinglePointGivesOneBinPerGrid) {
  const RowMatrix x(1, 3, std::vector<double>{0.2, 0.4, 0.9});
  for (const std::size_t r : {1u, 7u, 50u}) EXPECT_EQ(fit(x, 1.0, r, 32).num_features(), r);
}

TEST(RbFit, IdenticalPointsCollapse) {
  const RowMatrix x(25, 2, 0.5);
  EXPECT_EQ(fit(x, 0.01, 10, 33).num_features(), 10u);
}

TEST(RbFit, SmallSigmaOnTheUnitSquare) {
  std::mt19937_64 gen(34);
  const auto x = oracle::uniform_points(200, 2, gen);
  const auto t = fit(x, 0.1, 10, 35);
  const auto z = t.transform(x);
  EXPECT_EQ(z.nnz(), 2000u);
  EXPECT_GE(t.num_features(), 10u);
  EXPECT_LE(t.num_features(), 2000u);
  EXPECT_EQ(z.cols(), t.num_features());
}

TEST(RbFit, RejectsBadArguments) {
  const RowMatrix x(3, 2, 0.0);
  rbkit::Rng rng(1);
  EXPECT_THROW(RbTransform::fit(x, {KernelKind::Laplacian, 1.0, 2}, 0, rng), std::invalid_argument);
  EXPECT_THROW(RbTransform::fit(RowMatrix(0, 2), {KernelKind::Laplacian, 1.0, 2}, 3, rng),
               std::invalid_argument);
  EXPECT_THROW(RbTransform::fit(x, {KernelKind::Laplacian, 1.0, 3}, 3, rng), std::invalid_argument);
}

TEST(RbTransform, TrainingRowsHaveExactlyRNonzeros) {
  std::mt19937_64 gen(36);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + gen() % 100;
    const std::size_t d = 1 + gen() % 6;
    const std::size_t r = 1 + gen() % 40;
    const double sigma = std::pow(10.0, -2.0 + 4.0 * std::uniform_real_distribution<>(0, 1)(gen));
    const auto x = oracle::uniform_points(n, d, gen);
    const auto t = fit(x, sigma, r, gen());
    const auto z = t.transform(x);
    ASSERT_EQ(z.nnz(), n * r);
    const double value = 1.0 / std::sqrt(static_cast<double>(r));
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(z.row_nnz(i), r);
      for (const double v : z.row_values(i)) ASSERT_EQ(v, value);
      // one column per grid, inside that grid's column block
      for (std::size_t g = 0; g < r; ++g) {
        const auto c = z.row_cols(i)[g];
        EXPECT_GE(c, t.column_offset(g));
        EXPECT_LT(c, t.column_offset(g + 1));
      }
    }
    EXPECT_LE(t.num_features(), n * r);
    EXPECT_GE(t.num_features(), r);
  }
}

TEST(RbTransform, SelfKernelOfSingleFittedPointIsOne) {
  const RowMatrix x(1, 2, std::vector<double>{0.3, 0.6});
  const auto t = fit(x, 0.5, 16, 37);
  const auto z = t.transform(x);
  double dot = 0.0;
  for (const double v : z.row_values(0)) dot += v * v;
  EXPECT_NEAR(dot, 1.0, 1e-15);
  EXPECT_EQ(z.row_nnz(0), 16u);
}

TEST(RbTransform, FarTestPointGivesEmptyRow) {
  const RowMatrix x(5, 2, 0.5);
  const auto t = fit(x, 0.1, 8, 38);
  const auto z = t.transform(RowMatrix(1, 2, std::vector<double>{1e6, -1e6}));
  EXPECT_EQ(z.rows(), 1u);
  EXPECT_EQ(z.row_nnz(0), 0u);
  EXPECT_EQ(z.cols(), t.num_features());
}

TEST(RbTransform, UnseenBinsAreDroppedWithoutRenormalizing) {
  std::mt19937_64 gen(39);
  const auto x = oracle::uniform_points(50, 2, gen);
  const auto t = fit(x, 0.05, 32, 40);
  const auto test = oracle::uniform_points(200, 2, gen);
  const auto z = t.transform(test);
  bool saw_partial = false;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    EXPECT_LE(z.row_nnz(i), 32u);
    saw_partial = saw_partial || z.row_nnz(i) < 32u;
    for (const double v : z.row_values(i)) EXPECT_EQ(v, 1.0 / std::sqrt(32.0));
  }
  EXPECT_TRUE(saw_partial);
}

TEST(RbTransform, DimensionMismatchThrows) {
  const auto t = fit(RowMatrix(3, 2, 0.1), 1.0, 4, 41);
  EXPECT_THROW(t.transform(RowMatrix(3, 3, 0.1)), std::invalid_argument);
}

TEST(ApproxKernel, IdenticalPointsAlwaysCollide) {
  std::mt19937_64 gen(42);
  const auto x = oracle::uniform_points(10, 3, gen);
  const auto t = fit(x, 0.2, 64, 43);
  for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_EQ(t.approx_kernel(x.row(i), x.row(i)), 1.0);
}

TEST(ApproxKernel, SymmetricAndBounded) {
  std::mt19937_64 gen(44);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + gen() % 5;
    rbkit::Rng rng(gen());
    const auto t = RbTransform::sample({KernelKind::Laplacian, 0.5, d}, 1 + gen() % 20, rng);
    std::vector<double> a(d);
    std::vector<double> b(d);
    for (auto& v : a) v = normal(gen);
    for (auto& v : b) v = normal(gen);
    const double k = t.approx_kernel(a, b);
    EXPECT_EQ(k, t.approx_kernel(b, a));
    EXPECT_GE(k, 0.0);
    EXPECT_LE(k, 1.0);
  }
}

TEST(ApproxKernel, MatchesInnerProductOfFeatureRows) {
  std::mt19937_64 gen(45);
  const auto x = oracle::uniform_points(40, 3, gen);
  const auto t = fit(x, 0.3, 20, 46);
  const auto z = t.transform(x);
  const auto dense = z.to_dense();
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 40; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < dense.cols(); ++c) dot += dense(i, c) * dense(j, c);
      EXPECT_NEAR(t.approx_kernel(x.row(i), x.row(j)), dot, 1e-12);
    }
  }
}

TEST(ApproxKernel, SingleGridCollisionFrequencyIsTheKernel) {
  const KernelSpec spec{KernelKind::Laplacian, 1.0, 3};
  const std::vector<std::vector<double>> pairs{{0.1, 0.2, 0.3, 0.4, 0.1, 0.5},
                                               {0.0, 0.0, 0.0, 1.0, 0.5, 0.2},
                                               {0.9, 0.1, 0.4, 0.85, 0.15, 0.45}};
  rbkit::Rng rng(47);
  const std::size_t draws = 100'000;
  for (const auto& p : pairs) {
    const std::span<const double> a(p.data(), 3);
    const std::span<const double> b(p.data() + 3, 3);
    double hits = 0.0;
    for (std::size_t m = 0; m < draws; ++m) {
      hits += RbTransform::sample(spec, 1, rng).approx_kernel(a, b);
    }
    const double k = oracle::laplacian(a, b, 1.0);
    const double sd = std::sqrt(k * (1.0 - k) / static_cast<double>(draws));
    EXPECT_LE(std::abs(hits / static_cast<double>(draws) - k), 3.0 * sd) << "k=" << k;
  }
}

TEST(ApproxKernel, MeanOverFreshTransformsIsUnbiased) {
  const KernelSpec spec{KernelKind::Laplacian, 1.0, 4};
  const std::vector<double> a{0.2, 0.7, 0.1, 0.5};
  const std::vector<double> b{0.4, 0.5, 0.3, 0.6};
  const std::size_t m = 400;
  const std::size_t r = 32;
  rbkit::Rng rng(48);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += RbTransform::sample(spec, r, rng).approx_kernel(a, b);
  const double k = oracle::laplacian(a, b, 1.0);
  EXPECT_LE(std::abs(sum / static_cast<double>(m) - k),
            3.0 * std::sqrt(k * (1.0 - k) / static_cast<double>(m * r)));
}

TEST(ApproxKernel, ManyGridsApproximateTheKernel) {
  std::mt19937_64 gen(49);
  const KernelSpec spec{KernelKind::Laplacian, 1.0, 8};
  rbkit::Rng rng(50);
  const auto t = RbTransform::sample(spec, 1024, rng);
  const auto pts = oracle::uniform_points(400, 8, gen);
  double err = 0.0;
  for (std::size_t i = 0; i < 400; i += 2) {
    err += std::abs(t.approx_kernel(pts.row(i), pts.row(i + 1)) -
                    oracle::laplacian(pts.row(i), pts.row(i + 1), 1.0));
  }
  EXPECT_LE(err / 200.0, 0.02);
}

TEST(CollisionStats, IdenticalPoints) {
  const RowMatrix x(30, 2, 0.25);
  const auto t = fit(x, 0.5, 6, 51);
  const auto s = t.collision_stats(x);
  EXPECT_EQ(s.n, 30u);
  for (std::size_t g = 0; g < 6; ++g) {
    EXPECT_EQ(s.max_occupancy[g], 1.0);
    EXPECT_EQ(s.nonempty_bins[g], 1u);
  }
  EXPECT_EQ(s.kappa_bar, 1.0);
}

TEST(CollisionStats, IsolatedPoints) {
  const std::size_t n = 40;
  RowMatrix x(n, 1);
  for (std::size_t i = 0; i < n; ++i) x(i, 0) = static_cast<double>(i);
  const auto t = fit(x, 1e-4, 5, 52);
  const auto s = t.collision_stats(x);
  for (std::size_t g = 0; g < 5; ++g) {
    EXPECT_EQ(s.nonempty_bins[g], n);
    EXPECT_DOUBLE_EQ(s.max_occupancy[g], 1.0 / static_cast<double>(n));
  }
  EXPECT_DOUBLE_EQ(s.kappa_bar, static_cast<double>(n));
  EXPECT_DOUBLE_EQ(s.mean_inverse_collision, static_cast<double>(n));
}

TEST(CollisionStats, KappaBarIsColumnsPerGrid) {
  std::mt19937_64 gen(53);
  const auto x = oracle::uniform_points(200, 2, gen);
  const auto t = fit(x, 0.1, 10, 54);
  const auto s = t.collision_stats(x);
  EXPECT_DOUBLE_EQ(s.kappa_bar, static_cast<double>(t.num_features()) / 10.0);
  std::size_t total = 0;
  for (std::size_t g = 0; g < 10; ++g) {
    total += s.nonempty_bins[g];
    EXPECT_GE(s.max_occupancy[g] * 200.0, 1.0);
    EXPECT_LE(s.max_occupancy[g], 1.0);
  }
  EXPECT_EQ(total, t.num_features());
  EXPECT_DOUBLE_EQ(s.mean_nonempty_bins, static_cast<double>(total) / 10.0);
}

TEST(RbProperties, ColumnCountShrinksAsSigmaGrows) {
  const std::vector<double> sigmas{0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0};
  std::vector<double> mean_d(sigmas.size(), 0.0);
  std::mt19937_64 gen(55);
  const auto x = oracle::uniform_points(300, 4, gen);
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      mean_d[s] += static_cast<double>(fit(x, sigmas[s], 16, seed).num_features()) / 10.0;
    }
  }
  for (std::size_t s = 1; s < sigmas.size(); ++s) {
    EXPECT_LE(mean_d[s], mean_d[s - 1]) << "sigma " << sigmas[s];
  }
}

TEST(RbProperties, SameSeedSameTransform) {
  std::mt19937_64 gen(56);
  const auto x = oracle::uniform_points(80, 3, gen);
  const auto a = fit(x, 0.2, 12, 57);
  const auto b = fit(x, 0.2, 12, 57);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(a.transform(x), b.transform(x));
  EXPECT_NE(a.to_json(), fit(x, 0.2, 12, 58).to_json());
}

TEST(RbSerialization, JsonRoundTrip) {
  std::mt19937_64 gen(59);
  const auto x = oracle::uniform_points(60, 3, gen);
  const auto t = fit(x, 0.3, 9, 60);
  const auto back = RbTransform::from_json(nlohmann::json::parse(t.to_json().dump()));
  EXPECT_EQ(back.num_features(), t.num_features());
  const auto probe = oracle::uniform_points(30, 3, gen);
  EXPECT_EQ(back.transform(probe), t.transform(probe));
  EXPECT_EQ(back.transform(x), t.transform(x));
}
