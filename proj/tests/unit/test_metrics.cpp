#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rbkit/kernels.hpp"
#include "rbkit/metrics.hpp"
#include "rbkit/random.hpp"
#include "rbkit/rb_features.hpp"
#include "rbkit/solvers.hpp"

using rbkit::KernelKind;
using rbkit::KernelSpec;
using rbkit::RowMatrix;

TEST(Metrics, PerfectPredictions) {
  const std::vector<double> y{1.0, -1.0, 1.0};
  EXPECT_EQ(rbkit::rmse(y, y), 0.0);
  EXPECT_EQ(rbkit::accuracy(y, y), 1.0);
}

TEST(Metrics, ConstantPredictorOnBalancedLabels) {
  EXPECT_EQ(rbkit::accuracy(std::vector<double>(4, 1.0), std::vector<double>{1, -1, 1, -1}), 0.5);
}

TEST(Metrics, RmseByHand) {
  EXPECT_NEAR(rbkit::rmse(std::vector<double>{3, 4}, std::vector<double>{0, 0}),
              std::sqrt(12.5), 1e-15);
}

TEST(Metrics, Errors) {
  EXPECT_THROW(rbkit::rmse(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
  EXPECT_THROW(rbkit::accuracy(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST(Metrics, EvaluateChoosesTheMetric) {
  const auto r = rbkit::evaluate(rbkit::Task::Regression, std::vector<double>{1, 2},
                                 std::vector<double>{1, 4});
  EXPECT_EQ(r.kind, rbkit::MetricKind::RMSE);
  EXPECT_EQ(r.n, 2u);
  const auto a = rbkit::evaluate(rbkit::Task::Multiclass, std::vector<double>{0, 2},
                                 std::vector<double>{0, 1});
  EXPECT_EQ(a.kind, rbkit::MetricKind::Accuracy);
  EXPECT_EQ(a.value, 0.5);
}

TEST(ExactKernelRidge, HugeLambdaPredictsZero) {
  std::mt19937_64 gen(121);
  const auto x = oracle::uniform_points(30, 2, gen);
  std::vector<double> y(30);
  std::normal_distribution<double> normal;
  for (auto& v : y) v = normal(gen);
  const auto pred = rbkit::exact_kernel_ridge(x, y, x, {KernelKind::Laplacian, 1.0, 2}, 1e12);
  for (const double p : pred) EXPECT_NEAR(p, 0.0, 1e-9);
}

TEST(ExactKernelRidge, InterpolatesAtTinyLambda) {
  std::mt19937_64 gen(122);
  const auto x = oracle::uniform_points(40, 3, gen);
  std::vector<double> y(40);
  std::normal_distribution<double> normal;
  for (auto& v : y) v = normal(gen);
  const auto pred = rbkit::exact_kernel_ridge(x, y, x, {KernelKind::Laplacian, 0.5, 3}, 1e-14);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_NEAR(pred[i], y[i], 1e-4);
}

TEST(ExactKernelRidge, MatchesADirectSolve) {
  std::mt19937_64 gen(123);
  const auto x = oracle::uniform_points(25, 2, gen);
  const auto xt = oracle::uniform_points(10, 2, gen);
  std::vector<double> y(25);
  std::normal_distribution<double> normal;
  for (auto& v : y) v = normal(gen);
  const double lambda = 0.01;
  Eigen::MatrixXd k(25, 25);
  Eigen::MatrixXd kt(10, 25);
  for (std::size_t i = 0; i < 25; ++i) {
    for (std::size_t j = 0; j < 25; ++j) k(i, j) = oracle::laplacian(x.row(i), x.row(j), 0.7);
    k(i, i) += 25 * lambda;
  }
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 25; ++j) kt(i, j) = oracle::laplacian(xt.row(i), x.row(j), 0.7);
  }
  const Eigen::VectorXd expected = kt * k.partialPivLu().solve(oracle::to_eigen(y));
  const auto pred = rbkit::exact_kernel_ridge(x, y, xt, {KernelKind::Laplacian, 0.7, 2}, lambda);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(pred[i], expected(i), 1e-8);
}

TEST(ExactKernelRidge, InvariantToTrainingRowOrder) {
  std::mt19937_64 gen(124);
  const auto x = oracle::uniform_points(50, 3, gen);
  const auto xt = oracle::uniform_points(20, 3, gen);
  std::vector<double> y(50);
  std::normal_distribution<double> normal;
  for (auto& v : y) v = normal(gen);
  std::vector<std::size_t> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<double> yp(50);
  for (std::size_t i = 0; i < 50; ++i) yp[i] = y[perm[i]];
  const KernelSpec spec{KernelKind::Laplacian, 0.5, 3};
  const auto a = rbkit::exact_kernel_ridge(x, y, xt, spec, 1e-3);
  const auto b = rbkit::exact_kernel_ridge(x.select_rows(perm), yp, xt, spec, 1e-3);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(ExactKernelRidge, JitterIsNegligible) {
  std::mt19937_64 gen(125);
  const auto x = oracle::uniform_points(40, 2, gen);
  const auto xt = oracle::uniform_points(15, 2, gen);
  std::vector<double> y(40);
  std::normal_distribution<double> normal;
  for (auto& v : y) v = normal(gen);
  const double lambda = 1e-2;
  Eigen::MatrixXd k(40, 40);
  Eigen::MatrixXd kt(15, 40);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 40; ++j) k(i, j) = oracle::laplacian(x.row(i), x.row(j), 1.0);
    k(i, i) += 40 * lambda;
  }
  for (std::size_t i = 0; i < 15; ++i) {
    for (std::size_t j = 0; j < 40; ++j) kt(i, j) = oracle::laplacian(xt.row(i), x.row(j), 1.0);
  }
  const Eigen::VectorXd no_jitter = kt * k.ldlt().solve(oracle::to_eigen(y));
  const auto pred = rbkit::exact_kernel_ridge(x, y, xt, {KernelKind::Laplacian, 1.0, 2}, lambda);
  for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(pred[i], no_jitter(i), 1e-6);
}

TEST(ExactKernelRidge, RandomBinningApproachesItAsRGrows) {
  std::mt19937_64 gen(126);
  const std::size_t n = 300;
  const auto x = oracle::uniform_points(n, 3, gen);
  const auto xt = oracle::uniform_points(100, 3, gen);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(6 * x(i, 0)) + x(i, 1) * x(i, 2);
  const KernelSpec spec{KernelKind::Laplacian, 0.5, 3};
  const double lambda = 1e-3;
  const auto exact = rbkit::exact_kernel_ridge(x, y, xt, spec, lambda);
  std::vector<double> gaps;
  for (const std::size_t r : {4u, 32u, 256u}) {
    double gap = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      rbkit::Rng rng(seed);
      const auto t = rbkit::RbTransform::fit(x, spec, r, rng);
      rbkit::CgOptions opt;
      opt.tol = 1e-10;
      const auto w = rbkit::cg_ridge(t.transform(x), y, lambda * n, opt).w;
      const auto f = t.transform(xt).matvec(w);
      for (std::size_t i = 0; i < 100; ++i) gap += std::abs(f[i] - exact[i]) / 500.0;
    }
    gaps.push_back(gap);
  }
  EXPECT_GT(gaps[0], gaps[1]);
  EXPECT_GT(gaps[1], gaps[2]);
}
