#pragma once

// Independent reference implementations used to check the library. Nothing
// here calls into the code under test except for container types.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rbkit/dense.hpp"
#include "rbkit/sparse_matrix.hpp"

namespace oracle {

/// Random matrix with roughly `density` nonzeros, normal entries.
rbkit::SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density,
                                  std::mt19937_64& gen);

Eigen::MatrixXd to_eigen(const rbkit::SparseMatrix& a);
Eigen::MatrixXd to_eigen(const rbkit::RowMatrix& a);
Eigen::VectorXd to_eigen(std::span<const double> v);

/// (Z^T Z + lambda I)^{-1} Z^T y by a dense LDLT factorization.
Eigen::VectorXd ridge_direct(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double lambda);

/// lambda ||w||_1 + 1/(2N) ||Z w - y||^2 minimized by FISTA until the
/// objective stalls; returns the objective at the reference point.
double lasso_reference_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                 double lambda, std::size_t max_iter = 200000);

/// CDF of Gamma(shape 2, scale sigma).
double gamma2_cdf(double x, double sigma);

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// exp(-||a-b||_1 / sigma) written out directly.
double laplacian(std::span<const double> a, std::span<const double> b, double sigma);

/// Uniform points on [0,1]^d.
rbkit::RowMatrix uniform_points(std::size_t n, std::size_t d, std::mt19937_64& gen);

}  // namespace oracle
